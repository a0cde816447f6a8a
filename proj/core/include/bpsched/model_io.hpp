#ifndef BPSCHED_MODEL_IO_HPP
#define BPSCHED_MODEL_IO_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "bpsched/mrf.hpp"
#include "bpsched/schedulers.hpp"

namespace bpsched {

/// Parses the pgm text format:
///
///   pgm <num_vertices>
///   <num_edges> <format_version=0>
///   <card_0> ... <card_{V-1}>
///   V unary lines (card_i reals each)
///   E edge lines: <i> <j> <row-major |A_i| x |A_j| table>, i < j
///
/// Tokens are whitespace-separated; '#' starts a comment running to end of
/// line. Throws parse_error (with line number) on malformed input and
/// model_error on graph validation failures.
PairwiseMRF parse_model(std::string_view text);

/// Canonical text form: vertices and edges in id order, single spaces,
/// newline-terminated lines, doubles printed as shortest round-trip decimals.
/// parse_model(serialize_model(g)) reproduces g bit-exactly.
std::string serialize_model(const PairwiseMRF& graph);

/// Per-iteration trace CSV: header, one row per iteration, then a comment row
/// `# converged=<bool> iterations=<n> wall_time=<s>`.
void write_trace_csv(const RunResult& result, std::ostream& sink);

} // namespace bpsched

#endif
