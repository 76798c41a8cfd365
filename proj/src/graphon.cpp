#include "grwalk/graphon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <queue>
#include <sstream>

#include "grwalk/error.hpp"
#include "grwalk/io.hpp"
#include "grwalk/kernels.hpp"

namespace grwalk {
namespace {

double eval_bumps(const BumpSum& b, double x, double y) {
  double s = 0.0;
  for (const auto& bump : b.bumps) {
    const double dx = std::abs(x - bump.cx);
    const double dy = std::abs(y - bump.cy);
    const double ex = bump.power == 2.0 ? dx * dx : std::pow(dx, bump.power);
    const double ey = bump.power == 2.0 ? dy * dy : std::pow(dy, bump.power);
    s += bump.amplitude * std::exp(-(ex + ey) / bump.scale);
  }
  return s;
}

int cell_index(double t, Eigen::Index cells) {
  const auto i = static_cast<Eigen::Index>(std::floor(t * static_cast<double>(cells)));
  return static_cast<int>(std::clamp<Eigen::Index>(i, 0, cells - 1));
}

int block_index(const std::vector<double>& edges, double t) {
  // Interior edges only; block k covers [edges[k], edges[k+1]).
  auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, t);
  return static_cast<int>(it - (edges.begin() + 1));
}

std::vector<double> to_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Graphon::Graphon(std::string name, GraphonRepresentation representation, bool symmetric)
    : name_(std::move(name)),
      representation_(std::make_shared<const GraphonRepresentation>(std::move(representation))),
      symmetric_(symmetric) {
  if (const auto* block = std::get_if<BlockKernel>(representation_.get())) {
    const auto k = static_cast<Eigen::Index>(block->edges.size()) - 1;
    if (k < 1 || block->values.rows() != k || block->values.cols() != k)
      throw ConfigError("block graphon: values must be K x K for K+1 edges");
    if (block->edges.front() != 0.0 || block->edges.back() != 1.0 ||
        !std::is_sorted(block->edges.begin(), block->edges.end()))
      throw ConfigError("block graphon: edges must increase from 0 to 1");
  }
  if (const auto* grid = std::get_if<GridKernel>(representation_.get())) {
    if (grid->values.rows() < 1 || grid->values.rows() != grid->values.cols())
      throw ConfigError("grid graphon: values must be a non-empty square table");
  }
}

double Graphon::operator()(double x, double y) const {
  return std::visit(
      [x, y](const auto& rep) -> double {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, BumpSum>) {
          return eval_bumps(rep, x, y);
        } else if constexpr (std::is_same_v<T, GridKernel>) {
          const auto g = rep.values.rows();
          return rep.values(cell_index(x, g), cell_index(y, g));
        } else if constexpr (std::is_same_v<T, BlockKernel>) {
          return rep.values(block_index(rep.edges, x), block_index(rep.edges, y));
        } else {
          return rep.fn(x, y);
        }
      },
      *representation_);
}

void Graphon::validate(int grid) const {
  const MidpointGrid mg{grid};
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x = mg.node(i), y = mg.node(j);
      const double v = (*this)(x, y);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << "graphon '" << name_ << "' value " << v << " outside [0,1] at (" << x << ", " << y << ")";
        throw DomainError(os.str());
      }
      if (symmetric_ && std::abs(v - (*this)(y, x)) > 1e-12) {
        std::ostringstream os;
        os << "graphon '" << name_ << "' flagged symmetric but w(x,y) != w(y,x) at (" << x << ", " << y << ")";
        throw SymmetryError(os.str());
      }
    }
}

namespace builtin {

Graphon triple_peak() {
  BumpSum b{{{0.2, 0.2, 0.2, 2.0, 0.02}, {0.1, 0.5, 0.5, 2.0, 0.02}, {0.2, 0.8, 0.8, 4.0, 0.0005}}};
  return Graphon("triple-peak", std::move(b), true);
}

Graphon quadruple_peak() {
  BumpSum b{{{0.2, 0.15, 0.3, 2.0, 0.008},
             {0.2, 0.3, 0.45, 2.0, 0.008},
             {0.2, 0.45, 0.15, 2.0, 0.008},
             {0.15, 0.75, 0.75, 2.0, 0.02}}};
  return Graphon("quadruple-peak", std::move(b), false);
}

Graphon two_block(double a, double b) {
  Matrix v(2, 2);
  v << a, b, b, a;
  std::ostringstream name;
  name << "two-block(" << a << "," << b << ")";
  return Graphon(name.str(), BlockKernel{{0.0, 0.5, 1.0}, v}, true);
}

Graphon constant(double c) {
  std::ostringstream name;
  name << "constant(" << c << ")";
  return Graphon(name.str(), BlockKernel{{0.0, 1.0}, Matrix::Constant(1, 1, c)}, true);
}

Graphon bipartite() {
  Matrix v(2, 2);
  v << 0.0, 1.0, 1.0, 0.0;
  return Graphon("bipartite", BlockKernel{{0.0, 0.5, 1.0}, v}, true);
}

Graphon block_diagonal(double a) {
  Matrix v(2, 2);
  v << a, 0.0, 0.0, a;
  std::ostringstream name;
  name << "block-diagonal(" << a << ")";
  return Graphon(name.str(), BlockKernel{{0.0, 0.5, 1.0}, v}, true);
}

}  // namespace builtin

namespace {

std::vector<double> parse_arguments(std::string_view spec, std::string_view head) {
  std::vector<double> args;
  auto rest = spec.substr(head.size());
  if (rest.empty()) return args;
  if (rest.front() != '(' || rest.back() != ')')
    throw ConfigError("malformed graphon spec '" + std::string(spec) + "'");
  rest = rest.substr(1, rest.size() - 2);
  std::stringstream ss{std::string(rest)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("non-numeric graphon parameter '" + item + "' in '" + std::string(spec) + "'");
    }
  }
  return args;
}

}  // namespace

Graphon parse_builtin(std::string_view spec) {
  auto starts = [&](std::string_view head) { return spec.substr(0, head.size()) == head; };
  auto expect = [&](std::string_view head, std::size_t lo, std::size_t hi) {
    auto args = parse_arguments(spec, head);
    if (args.size() < lo || args.size() > hi)
      throw ConfigError("wrong number of parameters in graphon spec '" + std::string(spec) + "'");
    return args;
  };
  if (spec == "triple-peak") return builtin::triple_peak();
  if (spec == "quadruple-peak") return builtin::quadruple_peak();
  if (spec == "bipartite") return builtin::bipartite();
  if (starts("two-block")) {
    auto a = expect("two-block", 0, 2);
    if (a.size() == 1) throw ConfigError("two-block takes both block values: two-block(a,b)");
    return builtin::two_block(a.size() > 0 ? a[0] : 0.8, a.size() > 1 ? a[1] : 0.2);
  }
  if (starts("constant")) {
    auto a = expect("constant", 0, 1);
    return builtin::constant(a.empty() ? 0.5 : a[0]);
  }
  if (starts("block-diagonal")) {
    auto a = expect("block-diagonal", 0, 1);
    return builtin::block_diagonal(a.empty() ? 1.0 : a[0]);
  }
  throw ConfigError("unknown builtin graphon '" + std::string(spec) + "'");
}

Graphon row_scaled(const Graphon& base, std::function<double(double)> c, std::string name) {
  return Graphon(std::move(name),
                 CustomKernel{[base, c = std::move(c)](double x, double y) { return c(x) * base(x, y); }},
                 false);
}

Matrix sample_grid(const Graphon& g, int grid) {
  const auto nodes = to_vector(MidpointGrid{grid}.nodes());
  return kernels::tabulate([&g](double x, double y) { return g(x, y); }, nodes, nodes);
}

Graphon load_grid_csv(const std::filesystem::path& path, bool symmetric) {
  Matrix values = read_matrix_csv(path);
  if (values.rows() != values.cols())
    throw ParseError(path.string() + ": grid graphon must be square, got " +
                     std::to_string(values.rows()) + " x " + std::to_string(values.cols()));
  Graphon g(path.stem().string(), GridKernel{std::move(values)}, symmetric);
  g.validate(static_cast<int>(std::get<GridKernel>(g.representation()).values.rows()));
  return g;
}

void save_grid_csv(const Graphon& g, int grid, const std::filesystem::path& path) {
  write_matrix_csv(path, sample_grid(g, grid));
}

double DegreeProfile::out_degree(double x) const {
  const MidpointGrid mg{grid_size};
  double s = 0.0;
  for (int j = 0; j < grid_size; ++j) s += graphon(x, mg.node(j));
  return s * mg.weight();
}

double DegreeProfile::in_degree(double x) const {
  const MidpointGrid mg{grid_size};
  double s = 0.0;
  for (int j = 0; j < grid_size; ++j) s += graphon(mg.node(j), x);
  return s * mg.weight();
}

DegreeProfile degree_profile(const Graphon& g, int grid) {
  if (grid < 2) throw ConfigError("degree_profile: grid size must be >= 2");
  const MidpointGrid mg{grid};
  DegreeProfile dp{g, grid, mg.nodes(), {}, {}, 0.0};
  const Matrix table = sample_grid(g, grid);
  // Row sums in the same order as out_degree() so grid values agree bit-exactly.
  dp.d_out.resize(grid);
  for (int i = 0; i < grid; ++i) {
    double s = 0.0;
    for (int j = 0; j < grid; ++j) s += table(i, j);
    dp.d_out[i] = s * mg.weight();
  }
  dp.d_in.resize(grid);
  for (int j = 0; j < grid; ++j) {
    double s = 0.0;
    for (int i = 0; i < grid; ++i) s += table(i, j);
    dp.d_in[j] = s * mg.weight();
  }
  Eigen::Index at = 0;
  dp.d0 = dp.d_out.minCoeff(&at);
  if (dp.d0 <= kDegreeFloor) {
    std::ostringstream os;
    os << "graphon '" << g.name() << "': out-degree " << dp.d0 << " <= " << kDegreeFloor
       << " at x = " << dp.nodes[at] << " (positive lower bound on d_out violated)";
    throw DegeneracyError(os.str());
  }
  return dp;
}

TransitionDensity::TransitionDensity(DegreeProfile degrees) : degrees_(std::move(degrees)) {
  if (!(degrees_.d0 > 0.0)) throw DegeneracyError("transition density requires d0 > 0");
}

double TransitionDensity::operator()(double x, double y) const {
  return degrees_.graphon(x, y) / degrees_.out_degree(x);
}

Vector TransitionDensity::row(double x, const Vector& ys) const {
  const double d = degrees_.out_degree(x);
  Vector out(ys.size());
  for (Eigen::Index j = 0; j < ys.size(); ++j) out[j] = degrees_.graphon(x, ys[j]) / d;
  return out;
}

Matrix TransitionDensity::table() const {
  Matrix t = sample_grid(degrees_.graphon, degrees_.grid_size);
  for (Eigen::Index i = 0; i < t.rows(); ++i) t.row(i) /= degrees_.d_out[i];
  return t;
}

TransitionDensity transition_density(const Graphon& g, const DegreeProfile& dp) {
  if (g.name() != dp.graphon.name())
    throw ConfigError("transition_density: degree profile belongs to graphon '" + dp.graphon.name() + "'");
  return TransitionDensity(dp);
}

InvariantDensity invariant_density(const DegreeProfile& dp) {
  if (!dp.graphon.symmetric())
    throw SymmetryError("invariant density d/Z requires a symmetric graphon; '" + dp.graphon.name() +
                        "' is not flagged symmetric");
  const double z = dp.d_out.sum() / dp.grid_size;
  return InvariantDensity{dp, z};
}

ConnectednessReport connectedness_probe(const Graphon& g, int grid) {
  if (grid < 2) throw ConfigError("connectedness_probe: grid size must be >= 2");
  const Matrix table = sample_grid(g, grid);
  std::vector<int> component(static_cast<std::size_t>(grid), -1);
  std::queue<int> frontier;
  component[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int j = 0; j < grid; ++j) {
      if (component[j] >= 0) continue;
      if (table(i, j) > 0.0 || table(j, i) > 0.0) {
        component[j] = 0;
        frontier.push(j);
      }
    }
  }
  ConnectednessReport report{true, grid, {}};
  for (int i = 0; i < grid; ++i)
    if (component[i] == 0) report.witness_cells.push_back(i);
  if (static_cast<int>(report.witness_cells.size()) == grid) {
    report.witness_cells.clear();
  } else {
    report.connected = false;
  }
  return report;
}

}  // namespace grwalk
