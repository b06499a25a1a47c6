#include "flr/errors.hpp"

#include <utility>

namespace flr {

MissingFile::MissingFile(std::string role, std::string path)
    : DataError("missing file for role '" + role + "': " + path),
      role_(std::move(role)),
      path_(std::move(path)) {}

}  // namespace flr
