#include "bpsched/model_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "bpsched/errors.hpp"

namespace bpsched {

namespace {

/// Whitespace-separated token stream over the model text. '#' starts a
/// comment running to end of line. Tracks the 1-based line number for errors.
class Tokenizer {
public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  int line() const { return line_; }

  bool at_end() {
    skip_separators();
    return pos_ == text_.size();
  }

  std::string_view next(const char* expectation) {
    skip_separators();
    if (pos_ == text_.size()) {
      throw parse_error(std::string("expected ") + expectation + ", got end of input", line_);
    }
    const size_t start = pos_;
    while (pos_ < text_.size() && !is_separator(text_[pos_]) && text_[pos_] != '#') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  uint64_t next_count(const char* expectation) {
    const int at_line = line_;
    const std::string_view tok = next(expectation);
    uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw parse_error(std::string("expected ") + expectation + ", got '" + std::string(tok) + "'",
                        at_line);
    }
    return value;
  }

  double next_real(const char* expectation) {
    const int at_line = line_;
    const std::string_view tok = next(expectation);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw parse_error(std::string("expected ") + expectation + ", got '" + std::string(tok) + "'",
                        at_line);
    }
    if (!std::isfinite(value)) {
      throw parse_error("non-finite number '" + std::string(tok) + "'", at_line);
    }
    return value;
  }

private:
  static bool is_separator(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  }

  void skip_separators() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (is_separator(c)) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
};

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

} // namespace

PairwiseMRF parse_model(std::string_view text) {
  Tokenizer tok(text);

  const std::string_view magic = tok.next("'pgm' header");
  if (magic != "pgm") {
    throw parse_error("expected 'pgm' header, got '" + std::string(magic) + "'", tok.line());
  }
  const uint64_t num_vertices = tok.next_count("vertex count");
  const uint64_t num_edges = tok.next_count("edge count");
  const uint64_t version = tok.next_count("format version");
  if (version != 0) {
    throw parse_error("unsupported format version " + std::to_string(version), tok.line());
  }

  std::vector<uint32_t> cards(num_vertices);
  for (uint64_t v = 0; v < num_vertices; ++v) {
    const uint64_t c = tok.next_count("cardinality");
    if (c == 0 || c > UINT32_MAX) throw parse_error("cardinality out of range", tok.line());
    cards[v] = static_cast<uint32_t>(c);
  }

  std::vector<std::vector<double>> unaries(num_vertices);
  for (uint64_t v = 0; v < num_vertices; ++v) {
    unaries[v].resize(cards[v]);
    for (uint32_t x = 0; x < cards[v]; ++x) unaries[v][x] = tok.next_real("unary entry");
  }

  std::vector<PairwiseMRF::EdgeSpec> edges(num_edges);
  for (uint64_t e = 0; e < num_edges; ++e) {
    const int at_line = tok.line();
    const uint64_t i = tok.next_count("edge endpoint");
    const uint64_t j = tok.next_count("edge endpoint");
    if (i >= num_vertices || j >= num_vertices) {
      throw parse_error("edge endpoint out of range", at_line);
    }
    edges[e].i = static_cast<vertex_id>(i);
    edges[e].j = static_cast<vertex_id>(j);
    const size_t entries = static_cast<size_t>(cards[i]) * cards[j];
    edges[e].table.resize(entries);
    for (size_t t = 0; t < entries; ++t) edges[e].table[t] = tok.next_real("pairwise entry");
  }

  if (!tok.at_end()) {
    throw parse_error("unexpected trailing token '" + std::string(tok.next("")) + "'", tok.line());
  }
  return build_graph(std::move(cards), std::move(unaries), std::move(edges));
}

std::string serialize_model(const PairwiseMRF& graph) {
  std::string out;
  out += "pgm ";
  out += std::to_string(graph.num_vertices());
  out += '\n';
  out += std::to_string(graph.num_edges());
  out += " 0\n";

  for (vertex_id v = 0; v < graph.num_vertices(); ++v) {
    if (v != 0) out += ' ';
    out += std::to_string(graph.cardinality(v));
  }
  out += '\n';

  for (vertex_id v = 0; v < graph.num_vertices(); ++v) {
    const std::span<const double> u = graph.unary(v);
    for (size_t x = 0; x < u.size(); ++x) {
      if (x != 0) out += ' ';
      append_double(out, u[x]);
    }
    out += '\n';
  }

  for (edge_id e = 0; e < graph.num_edges(); ++e) {
    const auto [i, j] = graph.edge_endpoints(e);
    out += std::to_string(i);
    out += ' ';
    out += std::to_string(j);
    for (double t : graph.pairwise(e)) {
      out += ' ';
      append_double(out, t);
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const RunResult& result, std::ostream& sink) {
  std::string buf;
  buf += "iteration,frontier_size,unconverged,elapsed_seconds\n";
  for (const IterationRecord& rec : result.trace) {
    buf += std::to_string(rec.iteration);
    buf += ',';
    buf += std::to_string(rec.frontier_size);
    buf += ',';
    buf += std::to_string(rec.unconverged);
    buf += ',';
    append_double(buf, rec.elapsed_seconds);
    buf += '\n';
  }
  buf += "# converged=";
  buf += result.converged ? "true" : "false";
  buf += " iterations=";
  buf += std::to_string(result.iterations);
  buf += " wall_time=";
  append_double(buf, result.wall_time);
  buf += '\n';
  sink << buf;
  if (!sink) throw error("trace sink write failure");
}

} // namespace bpsched
