#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "clearsheet/workbook.hpp"

namespace clearsheet {

struct LoadOptions {
  // Protection passwords handed to the auditor; protected hidden content then counts as revealable.
  bool passwords_disclosed = false;
  std::vector<std::string> disclosed_sheets;
};

class LoadError : public std::runtime_error {
 public:
  enum class Kind { file_not_found, not_ooxml, malformed_part };
  LoadError(Kind kind, std::string member, const std::string& what)
      : std::runtime_error(what), kind_(kind), member_(std::move(member)) {}
  Kind kind() const { return kind_; }
  // Archive member that failed to parse; empty unless kind is malformed_part.
  const std::string& member() const { return member_; }

 private:
  Kind kind_;
  std::string member_;
};

// Reads an XLSX/XLSM package. Throws LoadError.
WorkbookModel load_workbook(const std::filesystem::path& path, const LoadOptions& options = {});
WorkbookModel load_workbook_bytes(std::string bytes, const LoadOptions& options = {});

}  // namespace clearsheet
