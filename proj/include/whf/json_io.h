#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "whf/factorization.h"
#include "whf/indices.h"
#include "whf/realization.h"

namespace whf {

using Json = nlohmann::ordered_json;

/// Row-major nested array of [re, im] pairs.
Json matrix_to_json(const Matrix& m);

/// Inverse of matrix_to_json. An empty array decodes to an empty matrix of
/// the expected shape; pass -1 for a dimension that is not known in advance.
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& name);

Json realization_to_json(const TwoSidedRealization& r);
TwoSidedRealization realization_from_json(const Json& j);

/// Throws ParseError with the byte offset of malformed input.
Json parse_json(const std::string& text, const std::string& origin);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

TwoSidedRealization load_realization(const std::filesystem::path& path);
void save_realization(const std::filesystem::path& path,
                      const TwoSidedRealization& r);

Json indices_to_json(const WienerHopfIndices& w);
Json report_residuals(const VerificationReport& rep);
Json bi_inner_to_json(const BiInnerRealization& g);

}  // namespace whf
