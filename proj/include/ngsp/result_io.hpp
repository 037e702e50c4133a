#ifndef NGSP_RESULT_IO_HPP
#define NGSP_RESULT_IO_HPP

#include <cstdint>
#include <filesystem>

#include "ngsp/grammar.hpp"
#include "ngsp/guide.hpp"

namespace ngsp {

// Result file: header lines `k`, `log_q`, `log_geom`, `log_layout`,
// `log_region`, `log_total` (floats at 9 significant digits), then one
// `<region_id> <label>` line per region.
void save_result(const std::filesystem::path& path, const ScoredProposal& p, std::int64_t k,
                 const Grammar& g);

ScoredProposal load_result(const std::filesystem::path& path, const Grammar& g,
                           int region_count, std::int64_t* k_out = nullptr);

} // namespace ngsp

#endif
