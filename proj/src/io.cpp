#include "densigraph/io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace densigraph {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

void write_environment(std::ostream& os, const Environment& env) {
  os << env.n() << ' ' << env.partition().size_plus() << ' ' << format_double(env.p()) << ' '
     << env.seed() << '\n';
  std::string line(env.n(), '0');
  for (std::size_t i = 0; i < env.n(); ++i) {
    for (std::size_t j = 0; j < env.n(); ++j) line[j] = env.edge(i, j) ? '1' : '0';
    os << line << '\n';
  }
}

Environment read_environment(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FormatError("environment file is empty");
  std::istringstream hs(header);
  std::size_t n = 0, size_plus = 0;
  double p = 0.0;
  Seed seed = 0;
  if (!(hs >> n >> size_plus >> p >> seed) || n == 0 || size_plus > n)
    throw FormatError("malformed environment header: '" + header + "'");
  Environment env(Partition(n, size_plus), p, seed);
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw FormatError("environment file truncated");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != n) throw FormatError("environment row " + std::to_string(i + 1) +
                                            " has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      if (line[j] != '0' && line[j] != '1')
        throw FormatError("environment row " + std::to_string(i + 1) + " has a non-binary char");
      if (line[j] == '1') env.set_edge(i, j, true);
    }
  }
  return env;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "# n=" << traj.n() << " t_len=" << traj.t_len() << '\n';
  os << "t,i,x\n";
  for (std::size_t t = 0; t < traj.t_len(); ++t)
    for (std::size_t i = 0; i < traj.n(); ++i)
      if (traj.at(i, t)) os << (t + 1) << ',' << (i + 1) << ",1\n";
}

Trajectory read_trajectory_csv(std::istream& is, std::optional<std::size_t> n,
                               std::optional<std::size_t> t_len) {
  std::vector<std::pair<std::size_t, std::size_t>> ones;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream cs(line.substr(1));
      std::string token;
      while (cs >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::size_t value = std::stoul(token.substr(eq + 1));
        if (key == "n" && !n) n = value;
        if (key == "t_len" && !t_len) t_len = value;
      }
      continue;
    }
    if (line == "t,i,x") continue;
    std::size_t t = 0, i = 0;
    int x = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> t >> c1 >> i >> c2 >> x) || c1 != ',' || c2 != ',' || t == 0 || i == 0)
      throw FormatError("malformed trajectory line " + std::to_string(line_no) + ": '" + line +
                        "'");
    if (x == 1)
      ones.emplace_back(t - 1, i - 1);
    else if (x != 0)
      throw FormatError("trajectory value must be 0 or 1 on line " + std::to_string(line_no));
  }
  if (!n || !t_len || *n == 0 || *t_len == 0)
    throw FormatError("trajectory dimensions unknown: supply the '# n= t_len=' line or overrides");
  std::vector<BitVector> columns(*t_len, BitVector(*n));
  for (const auto& [t, i] : ones) {
    if (t >= *t_len || i >= *n) throw FormatError("trajectory entry outside declared dimensions");
    columns[t].set(i, true);
  }
  Trajectory traj(*n);
  for (auto& col : columns) traj.push_back(std::move(col));
  return traj;
}

}  // namespace densigraph
