#ifndef NGSP_EXTERNAL_HPP
#define NGSP_EXTERNAL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ngsp/likelihood.hpp"

namespace ngsp {

// Batched external scorer protocol. Writes the query file, invokes
//   <command> <query_path> <response_path> <regs_path>
// and reads every score back. Every query must be answered exactly once with
// a value in [0, 1]; violations raise ScorerError.
std::vector<double> run_external_scorer(const std::string& command, double timeout_secs,
                                        const Grammar& g, const std::string& shape_id,
                                        const std::filesystem::path& regs_path,
                                        const std::vector<ScorerQuery>& queries);

// Serialized forms, exposed for tests.
std::string format_query_file(const Grammar& g, const std::string& shape_id,
                              const std::vector<ScorerQuery>& queries);
std::vector<double> parse_response_file(std::string_view text, std::size_t expected);

} // namespace ngsp

#endif
