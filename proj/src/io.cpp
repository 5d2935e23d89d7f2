#include "nnsparse/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nnsparse {

namespace {

[[noreturn]] void parse_fail(const std::string& path, long line,
                             const std::string& msg) {
  fail(Errc::parse, path + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open " + path + " for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (in.bad()) fail(Errc::io, "read error on " + path);
  return lines;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) fail(Errc::io, "write error on " + path);
}

// Whitespace-separated tokens of one line.
std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

double parse_double(const std::string& tok, const std::string& path,
                    long line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    parse_fail(path, line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size())
    parse_fail(path, line, "trailing characters in number '" + tok + "'");
  return v;
}

long parse_long(const std::string& tok, const std::string& path, long line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    parse_fail(path, line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size())
    parse_fail(path, line, "trailing characters in integer '" + tok + "'");
  return v;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RawSystem read_instance(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) parse_fail(path, 1, "missing header");
  const auto head = tokens_of(lines[0]);
  if (head.size() != 3 || head[0] != "nnls")
    parse_fail(path, 1, "expected header 'nnls m n'");
  RawSystem sys;
  sys.m = static_cast<int>(parse_long(head[1], path, 1));
  sys.n = static_cast<int>(parse_long(head[2], path, 1));
  if (sys.m < 1 || sys.n < 1)
    parse_fail(path, 1, "instance dimensions must be >= 1");
  sys.columns.resize(static_cast<std::size_t>(sys.n));

  std::size_t ln = 1;
  bool saw_b = false;
  for (; ln < lines.size(); ++ln) {
    const auto toks = tokens_of(lines[ln]);
    if (toks.empty()) continue;
    if (toks.size() == 1 && toks[0] == "b") {
      saw_b = true;
      ++ln;
      break;
    }
    if (toks.size() != 3)
      parse_fail(path, static_cast<long>(ln + 1),
                 "expected 'row col value' triplet");
    const long row = parse_long(toks[0], path, static_cast<long>(ln + 1));
    const long col = parse_long(toks[1], path, static_cast<long>(ln + 1));
    const double v = parse_double(toks[2], path, static_cast<long>(ln + 1));
    if (row < 0 || row >= sys.m)
      parse_fail(path, static_cast<long>(ln + 1), "row index out of range");
    if (col < 0 || col >= sys.n)
      parse_fail(path, static_cast<long>(ln + 1), "column index out of range");
    sys.columns[static_cast<std::size_t>(col)].entries.push_back(
        {static_cast<RowIndex>(row), v});
  }
  if (!saw_b) parse_fail(path, static_cast<long>(lines.size()), "missing 'b'");

  for (; ln < lines.size() && sys.b.size() < static_cast<std::size_t>(sys.m);
       ++ln)
    for (const auto& tok : tokens_of(lines[ln])) {
      if (sys.b.size() >= static_cast<std::size_t>(sys.m))
        parse_fail(path, static_cast<long>(ln + 1), "too many target values");
      sys.b.push_back(parse_double(tok, path, static_cast<long>(ln + 1)));
    }
  if (sys.b.size() != static_cast<std::size_t>(sys.m))
    parse_fail(path, static_cast<long>(lines.size()),
               "expected " + std::to_string(sys.m) + " target values, got " +
                   std::to_string(sys.b.size()));
  return sys;
}

std::string instance_to_string(const RawSystem& sys) {
  std::string out = "nnls " + std::to_string(sys.m) + " " +
                    std::to_string(sys.n) + "\n";
  for (std::size_t c = 0; c < sys.columns.size(); ++c) {
    auto entries = sys.columns[c].entries;
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [r, v] : entries)
      out += std::to_string(r) + " " + std::to_string(c) + " " +
             format_g17(v) + "\n";
  }
  out += "b\n";
  for (double v : sys.b) out += format_g17(v) + "\n";
  return out;
}

void write_instance(const RawSystem& sys, const std::string& path) {
  write_text(path, instance_to_string(sys));
}

Witness read_witness(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) parse_fail(path, 1, "missing header");
  const auto head = tokens_of(lines[0]);
  if (head.size() != 3 || head[0] != "witness")
    parse_fail(path, 1, "expected header 'witness k eps0'");
  Witness w;
  w.k = static_cast<int>(parse_long(head[1], path, 1));
  w.eps0 = parse_double(head[2], path, 1);
  if (w.k < 1) parse_fail(path, 1, "witness k must be >= 1");
  if (!(w.eps0 >= 0)) parse_fail(path, 1, "witness eps0 must be >= 0");
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto toks = tokens_of(lines[ln]);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      parse_fail(path, static_cast<long>(ln + 1), "expected 'col weight'");
    const long col = parse_long(toks[0], path, static_cast<long>(ln + 1));
    const double weight =
        parse_double(toks[1], path, static_cast<long>(ln + 1));
    if (col < 0)
      parse_fail(path, static_cast<long>(ln + 1), "column must be >= 0");
    if (!(weight > 0))
      parse_fail(path, static_cast<long>(ln + 1), "weight must be positive");
    if (w.x.entries.count(static_cast<ColId>(col)))
      parse_fail(path, static_cast<long>(ln + 1), "duplicate column");
    w.x.add(static_cast<ColId>(col), weight);
  }
  return w;
}

std::string witness_to_string(const Witness& w) {
  std::string out =
      "witness " + std::to_string(w.k) + " " + format_g17(w.eps0) + "\n";
  for (const auto& [id, weight] : w.x.entries)
    out += std::to_string(id) + " " + format_g17(weight) + "\n";
  return out;
}

void write_witness(const Witness& w, const std::string& path) {
  write_text(path, witness_to_string(w));
}

GaussianMixture read_mixture(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) parse_fail(path, 1, "missing header");
  const auto head = tokens_of(lines[0]);
  if (head.size() != 3 || head[0] != "gmm")
    parse_fail(path, 1, "expected header 'gmm d k'");
  GaussianMixture mix;
  mix.d = static_cast<int>(parse_long(head[1], path, 1));
  const long k = parse_long(head[2], path, 1);
  if (mix.d < 1) parse_fail(path, 1, "mixture dimension must be >= 1");
  if (k < 1) parse_fail(path, 1, "mixture component count must be >= 1");
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto toks = tokens_of(lines[ln]);
    if (toks.empty()) continue;
    if (toks.size() != 1 + 2 * static_cast<std::size_t>(mix.d))
      parse_fail(path, static_cast<long>(ln + 1),
                 "expected 'w mean... var...' with " + std::to_string(mix.d) +
                     " means and variances");
    GaussianComponent comp;
    comp.w = parse_double(toks[0], path, static_cast<long>(ln + 1));
    for (int a = 0; a < mix.d; ++a)
      comp.mean.push_back(parse_double(toks[static_cast<std::size_t>(1 + a)],
                                       path, static_cast<long>(ln + 1)));
    for (int a = 0; a < mix.d; ++a)
      comp.var.push_back(
          parse_double(toks[static_cast<std::size_t>(1 + mix.d + a)], path,
                       static_cast<long>(ln + 1)));
    mix.components.push_back(std::move(comp));
  }
  if (static_cast<long>(mix.components.size()) != k)
    parse_fail(path, static_cast<long>(lines.size()),
               "expected " + std::to_string(k) + " components, got " +
                   std::to_string(mix.components.size()));
  mix.validate();
  return mix;
}

std::string mixture_to_string(const GaussianMixture& m) {
  std::string out = "gmm " + std::to_string(m.d) + " " +
                    std::to_string(m.k()) + "\n";
  for (const auto& c : m.components) {
    out += format_g17(c.w);
    for (double v : c.mean) out += " " + format_g17(v);
    for (double v : c.var) out += " " + format_g17(v);
    out += "\n";
  }
  return out;
}

void write_mixture(const GaussianMixture& m, const std::string& path) {
  write_text(path, mixture_to_string(m));
}

std::vector<std::vector<double>> read_samples(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> samples;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto toks = tokens_of(lines[ln]);
    if (toks.empty()) continue;
    std::vector<double> s;
    s.reserve(toks.size());
    for (const auto& tok : toks)
      s.push_back(parse_double(tok, path, static_cast<long>(ln + 1)));
    if (!samples.empty() && s.size() != samples.front().size())
      parse_fail(path, static_cast<long>(ln + 1),
                 "sample dimension differs from the first sample");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string samples_to_string(
    const std::vector<std::vector<double>>& samples) {
  std::string out;
  for (const auto& s : samples) {
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (a) out += " ";
      out += format_g17(s[a]);
    }
    out += "\n";
  }
  return out;
}

void write_samples(const std::vector<std::vector<double>>& samples,
                   const std::string& path) {
  write_text(path, samples_to_string(samples));
}

SparseSolution read_solution(const std::string& path) {
  const auto lines = read_lines(path);
  SparseSolution s;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto toks = tokens_of(lines[ln]);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      parse_fail(path, static_cast<long>(ln + 1), "expected 'col weight'");
    const long col = parse_long(toks[0], path, static_cast<long>(ln + 1));
    const double weight =
        parse_double(toks[1], path, static_cast<long>(ln + 1));
    if (col < 0)
      parse_fail(path, static_cast<long>(ln + 1), "column must be >= 0");
    if (!(weight > 0))
      parse_fail(path, static_cast<long>(ln + 1), "weight must be positive");
    if (s.entries.count(static_cast<ColId>(col)))
      parse_fail(path, static_cast<long>(ln + 1), "duplicate column");
    s.add(static_cast<ColId>(col), weight);
  }
  return s;
}

std::string solution_to_string(const SparseSolution& s) {
  std::string out;
  for (const auto& [id, weight] : s.entries)
    out += std::to_string(id) + " " + format_g17(weight) + "\n";
  return out;
}

void write_solution(const SparseSolution& s, const std::string& path) {
  write_text(path, solution_to_string(s));
}

std::vector<TraceEntry> read_trace(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<TraceEntry> trace;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto toks = tokens_of(lines[ln]);
    if (toks.empty()) continue;
    if (ln == 0 && !toks.empty() && toks[0] == "iter") continue;  // header
    if (toks.size() != 6)
      parse_fail(path, static_cast<long>(ln + 1),
                 "expected 6 tab separated fields");
    TraceEntry e;
    e.iter = parse_long(toks[0], path, static_cast<long>(ln + 1));
    e.col = static_cast<ColId>(
        parse_long(toks[1], path, static_cast<long>(ln + 1)));
    e.theta = parse_double(toks[2], path, static_cast<long>(ln + 1));
    e.log_ratio = parse_double(toks[3], path, static_cast<long>(ln + 1));
    e.psi = parse_double(toks[4], path, static_cast<long>(ln + 1));
    e.log_phi = parse_double(toks[5], path, static_cast<long>(ln + 1));
    trace.push_back(e);
  }
  return trace;
}

std::string trace_to_string(const std::vector<TraceEntry>& trace) {
  std::string out = "iter\tcol\ttheta\tlog_ratio\tpsi\tlog_phi\n";
  for (const auto& e : trace) {
    out += std::to_string(e.iter) + "\t" + std::to_string(e.col) + "\t" +
           format_g17(e.theta) + "\t" + format_g17(e.log_ratio) + "\t" +
           format_g17(e.psi) + "\t" + format_g17(e.log_phi) + "\n";
  }
  return out;
}

void write_trace(const std::vector<TraceEntry>& trace,
                 const std::string& path) {
  write_text(path, trace_to_string(trace));
}

std::vector<std::vector<int>> read_sets(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::vector<int>> sets;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string line = lines[ln];
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto toks = tokens_of(line);
    if (toks.empty()) continue;
    std::vector<int> set;
    set.reserve(toks.size());
    for (const auto& tok : toks)
      set.push_back(static_cast<int>(
          parse_long(tok, path, static_cast<long>(ln + 1))));
    sets.push_back(std::move(set));
  }
  if (sets.empty()) parse_fail(path, 1, "no sets in file");
  return sets;
}

}  // namespace nnsparse
