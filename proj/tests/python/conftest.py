import os
import sys

# Under ctest, import the module just built rather than any installed copy.
_stage = os.environ.get("CLEARSHEET_STAGE")
if _stage:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, _stage)
