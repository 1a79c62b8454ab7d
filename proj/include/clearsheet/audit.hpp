#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clearsheet/lint.hpp"
#include "clearsheet/scorer.hpp"
#include "clearsheet/xlsx.hpp"

namespace clearsheet {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "clearsheet-report/1";

enum class OutputFormat { text, structured };

struct AuditConfig {
  ScoringConfig scoring;
  std::optional<std::filesystem::path> catalog_path;
  // Category ("units", "formats", "identity", "interrogatives", "documentation") to replacement file.
  std::map<std::string, std::filesystem::path> lexicon_paths;
  ParamGrade unknown_function_grade = ParamGrade::insufficient;
  std::optional<int> fail_threshold;  // <= 0
  OutputFormat format = OutputFormat::text;
  LoadOptions load;
  bool timing = false;
  int jobs = 0;  // 0 = one worker per file, capped by hardware concurrency
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// key=value lines; '#' starts a comment. Unknown keys are rejected. Throws ConfigError.
AuditConfig parse_config(std::string_view text, AuditConfig base = {});
AuditConfig load_config(const std::filesystem::path& path, AuditConfig base = {});
// "40x20"
VicinityConfig parse_vicinity(std::string_view text, VicinityConfig base = {});

enum ExitCode { kExitOk = 0, kExitOpaque = 1, kExitBelowThreshold = 2, kExitLoadFailure = 3 };

// Worst-wins ordering across a batch: load failure, then opaque, then threshold, then ok.
int worse_exit_code(int a, int b);

struct FileReport {
  std::string path;
  std::string digest;  // "sha256:<hex>", empty when unreadable
  std::optional<std::string> load_error;
  std::string load_error_kind;
  std::string load_error_member;
  std::optional<ModelScore> model;
  std::vector<Finding> findings;
  std::vector<std::string> sheet_order;
  std::map<CellAddress, std::string> formulas;  // formula text of scored cells
  std::optional<double> elapsed_ms;
  int exit_code = kExitOk;
};

struct AuditReport {
  std::string tool_version = kToolVersion;
  AuditConfig config;
  std::vector<FileReport> files;
  int exit_code = kExitOk;
};

// Catalog and lexicons named by the config, or the built-in ones. Throws CatalogError/LexiconError.
struct AuditResources {
  FunctionCatalog catalog;
  Lexicons lexicons;
};
AuditResources load_resources(const AuditConfig& cfg);

FileReport audit_workbook(const WorkbookModel& wb, const AuditConfig& cfg, const AuditResources& res,
                          std::string label = "<memory>");
FileReport audit_file(const std::filesystem::path& path, const AuditConfig& cfg, const AuditResources& res);
// Files run in parallel; reports keep input order.
AuditReport run_audit(const std::vector<std::filesystem::path>& paths, const AuditConfig& cfg);
AuditReport run_audit(const std::vector<std::filesystem::path>& paths, const AuditConfig& cfg,
                      const AuditResources& res);

std::string emit_text(const AuditReport& report);
std::string emit_structured(const AuditReport& report);
std::string emit(const AuditReport& report, OutputFormat format);

// "TRANSPARENT (0 steps from transparency)", "-4 steps from transparency", "OPAQUE".
std::string summary_line(Score total);

std::string sha256_hex(std::string_view bytes);

}  // namespace clearsheet
