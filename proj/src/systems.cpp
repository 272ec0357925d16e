#include "delaylab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delaylab/rng.hpp"

namespace delaylab {

namespace {

constexpr double kCellTol = 1e-9;

double reduce_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

// four-corner translation for symbol s in {0,1,2,3}: bits (x, y) = (s>>1, s&1)
void four_corner_offset(int s, double lambda, double& tx, double& ty) {
  tx = (s & 2) ? 1.0 - lambda : 0.0;
  ty = (s & 1) ? 1.0 - lambda : 0.0;
}

// per-axis first-level cell bit on [0,1]; cells are [0,l] and [1-l,1]
int axis_bit(double u, double l) {
  bool lo = u <= l + kCellTol;
  bool hi = u >= 1.0 - l - kCellTol;
  if (lo) return 0;  // ties resolve to the smaller symbol
  if (hi) return 1;
  throw CodingError("point outside every first-level cell");
}

}  // namespace

SystemSpec make_solenoid(bool squared) {
  SystemSpec s;
  s.kind = SystemKind::Solenoid;
  s.ambient_dim = 3;
  s.squared = squared;
  // angle doubles (twice when squared); the fiber contracts
  s.lipschitz_bound = squared ? 4.0 : 2.0;
  return s;
}

SystemSpec make_four_corner(double lambda) {
  if (!(lambda > 0.25 && lambda < 0.5))
    throw std::invalid_argument("four-corner ratio must lie in (1/4, 1/2)");
  SystemSpec s;
  s.kind = SystemKind::CornerCantorShift;
  s.ambient_dim = 2;
  s.lambda = lambda;
  s.lipschitz_bound = 1.0 / lambda;  // shift expands by 1/lambda
  return s;
}

SystemSpec make_tent() {
  SystemSpec s;
  s.kind = SystemKind::TentHalf;
  s.ambient_dim = 1;
  s.lipschitz_bound = 1.0;
  return s;
}

SystemSpec make_identity(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("identity: dim must be 1..3");
  SystemSpec s;
  s.kind = SystemKind::Identity;
  s.ambient_dim = dim;
  s.lipschitz_bound = 1.0;
  return s;
}

SystemSpec make_union_chain(double lambda1, double lambda2) {
  const double lo1 = 1.0 / (2.0 * std::sqrt(2.0));
  if (!(lambda1 > lo1 && lambda1 < 0.5))
    throw std::invalid_argument("union chain: lambda1 must lie in (1/(2*sqrt(2)), 1/2)");
  if (!(lambda2 > 0.0 && std::log(8.0) / -std::log(lambda2) < 1.0))
    throw std::invalid_argument("union chain: lambda2 must satisfy log 8 / -log lambda2 < 1");
  SystemSpec s;
  s.kind = SystemKind::UnionChain;
  s.ambient_dim = 3;
  s.lambda1 = lambda1;
  s.lambda2 = lambda2;
  // conjugacy X1 -> X2: cells separated by (1-2*l1) l1^n map into cells of
  // diameter sqrt(3) l2^n; the ratio peaks at n = 0
  s.lipschitz_bound = std::sqrt(3.0) / (1.0 - 2.0 * lambda1);
  return s;
}

SystemSpec make_ifs(int dim, std::vector<IFSMap> maps) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("ifs: dim must be 1..3");
  if (maps.empty()) throw std::invalid_argument("ifs: empty map list");
  for (const auto& m : maps)
    if (!(m.ratio > 0.0 && m.ratio < 1.0)) throw std::invalid_argument("ifs: ratio must lie in (0,1)");
  SystemSpec s;
  s.kind = SystemKind::SelfSimilarIFS;
  s.ambient_dim = dim;
  s.maps = std::move(maps);
  double rmin = 1.0;
  for (const auto& m : s.maps) rmin = std::min(rmin, m.ratio);
  s.lipschitz_bound = 1.0 / rmin;
  return s;
}

Metric phase_metric(const SystemSpec& spec) {
  return Metric{spec.kind == SystemKind::Solenoid};
}

BoundingBox domain_box(const SystemSpec& spec) {
  BoundingBox b;
  b.dim = spec.ambient_dim;
  switch (spec.kind) {
    case SystemKind::Solenoid:
      b.lo = {0.0, -1.0, -1.0};
      b.hi = {kTwoPi, 1.0, 1.0};
      break;
    case SystemKind::CornerCantorShift:
      b.lo = {0.0, 0.0, 0.0};
      b.hi = {1.0, 1.0, 0.0};
      break;
    case SystemKind::UnionChain:
      b.lo = {0.0, 0.0, 0.0};
      b.hi = {5.0, 5.0, 5.0};
      break;
    case SystemKind::SelfSimilarIFS: {
      // attractor of contractions x -> r x + t lies in the box solving the
      // fixed-point inclusion per axis
      for (int d = 0; d < b.dim; ++d) {
        double lo = 0.0, hi = 0.0;
        for (int pass = 0; pass < 64; ++pass) {
          double nlo = lo, nhi = hi;
          for (const auto& m : spec.maps) {
            nlo = std::min(nlo, m.ratio * lo + m.offset[static_cast<std::size_t>(d)]);
            nhi = std::max(nhi, m.ratio * hi + m.offset[static_cast<std::size_t>(d)]);
          }
          lo = nlo;
          hi = nhi;
        }
        b.lo[static_cast<std::size_t>(d)] = lo;
        b.hi[static_cast<std::size_t>(d)] = hi;
      }
      break;
    }
    default:
      for (int d = 0; d < b.dim; ++d) {
        b.lo[static_cast<std::size_t>(d)] = 0.0;
        b.hi[static_cast<std::size_t>(d)] = 1.0;
      }
      break;
  }
  return b;
}

PhasePoint solenoid_step(const PhasePoint& p, bool squared) {
  if (p.dim != 3) throw std::invalid_argument("solenoid_step: expected a 3d point");
  double t = p[0], re = p[1], im = p[2];
  if (re * re + im * im > 1.0 + 1e-9)
    throw std::domain_error("solenoid_step: point outside the solid torus");
  int passes = squared ? 2 : 1;
  for (int i = 0; i < passes; ++i) {
    double nre = 0.25 * re + 0.5 * std::cos(t);
    double nim = 0.25 * im + 0.5 * std::sin(t);
    t = reduce_angle(2.0 * t);
    re = nre;
    im = nim;
  }
  return make_point(t, re, im);
}

double tent_step(double x) { return std::fabs(x - 0.5); }

PhasePoint cantor_shift_step(const PhasePoint& p, double lambda) {
  if (p.dim != 2) throw std::invalid_argument("cantor_shift_step: expected a 2d point");
  int bx = axis_bit(p[0], lambda);
  int by = axis_bit(p[1], lambda);
  int s = 2 * bx + by;
  double tx, ty;
  four_corner_offset(s, lambda, tx, ty);
  return make_point((p[0] - tx) / lambda, (p[1] - ty) / lambda);
}

namespace {

PhasePoint union_chain_step(const SystemSpec& spec, const PhasePoint& p);

PhasePoint ifs_shift_step(const SystemSpec& spec, const PhasePoint& p) {
  BoundingBox box = domain_box(spec);
  int chosen = -1;
  PhasePoint best;
  for (std::size_t i = 0; i < spec.maps.size(); ++i) {
    const auto& m = spec.maps[i];
    PhasePoint q = p;
    bool inside = true;
    for (int d = 0; d < spec.ambient_dim; ++d) {
      q[d] = (p[d] - m.offset[static_cast<std::size_t>(d)]) / m.ratio;
      if (q[d] < box.lo[static_cast<std::size_t>(d)] - kCellTol / m.ratio ||
          q[d] > box.hi[static_cast<std::size_t>(d)] + kCellTol / m.ratio) {
        inside = false;
        break;
      }
    }
    if (inside && chosen < 0) {
      chosen = static_cast<int>(i);
      best = q;
    }
  }
  if (chosen < 0) throw CodingError("point outside every first-level cell");
  return best;
}

}  // namespace

PhasePoint step(const SystemSpec& spec, const PhasePoint& p) {
  switch (spec.kind) {
    case SystemKind::Solenoid:
      return solenoid_step(p, spec.squared);
    case SystemKind::CornerCantorShift:
      return cantor_shift_step(p, spec.lambda);
    case SystemKind::TentHalf: {
      if (p.dim != 1) throw std::invalid_argument("tent: expected a 1d point");
      return make_point(tent_step(p[0]));
    }
    case SystemKind::Identity:
      return p;
    case SystemKind::UnionChain:
      return union_chain_step(spec, p);
    case SystemKind::SelfSimilarIFS:
      return ifs_shift_step(spec, p);
  }
  throw std::logic_error("step: unknown system kind");
}

PointCloud sample_srb(std::size_t n, std::size_t burn_in, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_srb: n must be >= 1");
  Rng rng(split_seed(seed, 0));
  double t = rng.uniform(0.0, kTwoPi);
  double r = std::sqrt(rng.uniform());
  double a = rng.uniform(0.0, kTwoPi);
  PhasePoint p = make_point(t, r * std::cos(a), r * std::sin(a));
  for (std::size_t i = 0; i < burn_in; ++i) p = solenoid_step(p, true);

  PointCloud cloud;
  cloud.dim = 3;
  cloud.metric = Metric{true};
  cloud.seed = seed;
  cloud.provenance = "orbit-average";
  cloud.system = "solenoid";
  cloud.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.push(p, w);
    p = solenoid_step(p, true);
  }
  normalize_weights(cloud);
  return cloud;
}

PhasePoint ifs_natural_projection(const std::vector<int>& word, double lambda) {
  if (!(lambda > 0.25 && lambda < 0.5))
    throw std::invalid_argument("ifs_natural_projection: ratio must lie in (1/4, 1/2)");
  if (word.empty()) throw std::invalid_argument("ifs_natural_projection: empty word");
  double x = 0.0, y = 0.0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it < 0 || *it > 3) throw std::invalid_argument("ifs_natural_projection: symbol outside {0,1,2,3}");
    double tx, ty;
    four_corner_offset(*it, lambda, tx, ty);
    x = lambda * x + tx;
    y = lambda * y + ty;
  }
  return make_point(x, y);
}

namespace union_chain_detail {
std::size_t coding_depth(double ratio) {
  return static_cast<std::size_t>(std::ceil(std::log(1e-9) / std::log(ratio)));
}
}  // namespace union_chain_detail

PointCloud sample_self_similar(std::size_t n, double lambda, std::uint64_t seed,
                               std::size_t depth) {
  if (depth == 0) depth = union_chain_detail::coding_depth(lambda);
  if (std::pow(lambda, static_cast<double>(depth)) >= 1e-9)
    throw std::invalid_argument("sample_self_similar: coding depth too shallow");
  Rng rng(split_seed(seed, 1));
  PointCloud cloud;
  cloud.dim = 2;
  cloud.seed = seed;
  cloud.provenance = "iid-coding";
  cloud.system = describe(make_four_corner(lambda));
  cloud.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  std::vector<int> word(depth);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& s : word) s = static_cast<int>(rng.below(4));
    cloud.push(ifs_natural_projection(word, lambda), w);
  }
  normalize_weights(cloud);
  return cloud;
}

namespace {

void cube_corner(int s, double& cx, double& cy, double& cz) {
  cx = (s & 4) ? 1.0 : 0.0;
  cy = (s & 2) ? 1.0 : 0.0;
  cz = (s & 1) ? 1.0 : 0.0;
}

PhasePoint cube_projection(const std::vector<int>& word, double ratio, double base) {
  // attractor of u -> ratio*u + (1-ratio)*corner inside [base, base+1]^3
  double x = 0, y = 0, z = 0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    double cx, cy, cz;
    cube_corner(*it, cx, cy, cz);
    x = ratio * x + (1.0 - ratio) * cx;
    y = ratio * y + (1.0 - ratio) * cy;
    z = ratio * z + (1.0 - ratio) * cz;
  }
  return make_point(base + x, base + y, base + z);
}

std::vector<int> cube_decode(const PhasePoint& p, double ratio, double base, std::size_t depth) {
  double u[3] = {p[0] - base, p[1] - base, p[2] - base};
  std::vector<int> word(depth);
  for (std::size_t j = 0; j < depth; ++j) {
    int s = 0;
    for (int d = 0; d < 3; ++d) {
      // cells are [0, ratio] and [1-ratio, 1] scaled by (1-ratio) offsets
      bool hi = u[d] >= 1.0 - ratio - kCellTol;
      bool lo = u[d] <= ratio + kCellTol;
      if (!lo && !hi) throw CodingError("union chain: point off the head attractor");
      int bit = hi && !lo ? 1 : 0;
      s |= bit << (2 - d);
      u[d] = (u[d] - (bit ? (1.0 - ratio) : 0.0)) / ratio;
    }
    word[j] = s;
  }
  return word;
}

PhasePoint union_chain_step(const SystemSpec& spec, const PhasePoint& p) {
  using namespace union_chain_detail;
  if (p.dim != 3) throw std::invalid_argument("union chain: expected a 3d point");
  const double slack = 1e-6;
  auto inside = [&](double base) {
    for (int d = 0; d < 3; ++d)
      if (p[d] < base - slack || p[d] > base + 1.0 + slack) return false;
    return true;
  };
  double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  if (norm <= slack) return make_point(0.0, 0.0, 0.0);
  if (inside(kHeadBase)) {
    // decode to the tail's precision depth only: the image is insensitive to
    // deeper symbols (lambda2^depth < 1e-9) and decoding amplifies rounding
    // by 1/lambda1 per level
    auto word = cube_decode(p, spec.lambda1, kHeadBase, coding_depth(spec.lambda2) + 1);
    return cube_projection(word, spec.lambda2, kTailBase);
  }
  if (inside(kTailBase)) {
    // first shrinking copy: f_3(x) = (x + 3*m2)/8 with m2 the X2 center
    return make_point((p[0] + 7.5) / 8.0, (p[1] + 7.5) / 8.0, (p[2] + 7.5) / 8.0);
  }
  // remaining copies halve toward the fixed point at the origin
  if (norm < 2.5 * std::sqrt(3.0) && p[0] > 0 && p[1] > 0 && p[2] > 0)
    return make_point(p[0] / 2.0, p[1] / 2.0, p[2] / 2.0);
  throw std::domain_error("union chain: point outside the invariant set");
}

}  // namespace

PointCloud sample_union_chain(std::size_t n, const SystemSpec& spec, std::uint64_t seed) {
  using namespace union_chain_detail;
  if (spec.kind != SystemKind::UnionChain)
    throw std::invalid_argument("sample_union_chain: wrong system kind");
  Rng rng(split_seed(seed, 2));
  const std::size_t depth = coding_depth(spec.lambda1);
  PointCloud cloud;
  cloud.dim = 3;
  cloud.seed = seed;
  cloud.provenance = "iid-coding";
  cloud.system = describe(spec);
  cloud.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  std::vector<int> word(depth);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& s : word) s = static_cast<int>(rng.below(8));
    cloud.push(cube_projection(word, spec.lambda1, kHeadBase), w);
  }
  normalize_weights(cloud);
  return cloud;
}

PointCloud sample_uniform_box(std::size_t n, int dim, std::uint64_t seed) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("sample_uniform_box: dim must be 1..3");
  Rng rng(split_seed(seed, 3));
  PointCloud cloud;
  cloud.dim = dim;
  cloud.seed = seed;
  cloud.provenance = "iid-uniform";
  cloud.system = "identity:dim=" + std::to_string(dim);
  cloud.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  PhasePoint p;
  p.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) p[d] = rng.uniform();
    cloud.push(p, w);
  }
  normalize_weights(cloud);
  return cloud;
}

PointCloud sample_measure(const SystemSpec& spec, std::size_t n, std::uint64_t seed,
                          std::size_t burn_in) {
  switch (spec.kind) {
    case SystemKind::Solenoid:
      return sample_srb(n, burn_in, seed);
    case SystemKind::CornerCantorShift:
      return sample_self_similar(n, spec.lambda, seed);
    case SystemKind::UnionChain:
      return sample_union_chain(n, spec, seed);
    case SystemKind::TentHalf:
    case SystemKind::Identity: {
      PointCloud c = sample_uniform_box(n, spec.ambient_dim, seed);
      c.system = describe(spec);
      return c;
    }
    case SystemKind::SelfSimilarIFS: {
      Rng rng(split_seed(seed, 4));
      double rmax = 0.0;
      for (const auto& m : spec.maps) rmax = std::max(rmax, m.ratio);
      std::size_t depth = union_chain_detail::coding_depth(rmax);
      PointCloud cloud;
      cloud.dim = spec.ambient_dim;
      cloud.seed = seed;
      cloud.provenance = "iid-coding";
      cloud.system = describe(spec);
      cloud.reserve(n);
      const double w = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        PhasePoint p;
        p.dim = spec.ambient_dim;
        std::vector<int> word(depth);
        for (auto& s : word) s = static_cast<int>(rng.below(spec.maps.size()));
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
          const auto& m = spec.maps[static_cast<std::size_t>(*it)];
          for (int d = 0; d < p.dim; ++d) p[d] = m.ratio * p[d] + m.offset[static_cast<std::size_t>(d)];
        }
        cloud.push(p, w);
      }
      normalize_weights(cloud);
      return cloud;
    }
  }
  throw std::logic_error("sample_measure: unknown system kind");
}

std::string describe(const SystemSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  switch (spec.kind) {
    case SystemKind::Solenoid:
      os << "solenoid";
      if (!spec.squared) os << ":single";
      break;
    case SystemKind::CornerCantorShift:
      os << "four_corner:lambda=" << spec.lambda;
      break;
    case SystemKind::TentHalf:
      os << "tent";
      break;
    case SystemKind::Identity:
      os << "identity:dim=" << spec.ambient_dim;
      break;
    case SystemKind::UnionChain:
      os << "union_chain:l1=" << spec.lambda1 << ":l2=" << spec.lambda2;
      break;
    case SystemKind::SelfSimilarIFS:
      os << "ifs:dim=" << spec.ambient_dim;
      for (const auto& m : spec.maps) {
        os << ":map=" << m.ratio;
        for (int d = 0; d < spec.ambient_dim; ++d) os << "/" << m.offset[static_cast<std::size_t>(d)];
      }
      break;
  }
  return os.str();
}

SystemSpec parse_system(const std::string& desc) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : desc) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  auto value_of = [&](const std::string& key) -> std::string {
    for (std::size_t i = 1; i < parts.size(); ++i)
      if (parts[i].rfind(key + "=", 0) == 0) return parts[i].substr(key.size() + 1);
    throw std::invalid_argument("system descriptor missing field: " + key);
  };
  const std::string& kind = parts.at(0);
  if (kind == "solenoid") {
    bool squared = true;
    for (std::size_t i = 1; i < parts.size(); ++i)
      if (parts[i] == "single") squared = false;
    return make_solenoid(squared);
  }
  if (kind == "four_corner") return make_four_corner(std::stod(value_of("lambda")));
  if (kind == "tent") return make_tent();
  if (kind == "identity") return make_identity(std::stoi(value_of("dim")));
  if (kind == "union_chain")
    return make_union_chain(std::stod(value_of("l1")), std::stod(value_of("l2")));
  if (kind == "ifs") {
    int dim = std::stoi(value_of("dim"));
    std::vector<IFSMap> maps;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].rfind("map=", 0) != 0) continue;
      std::string body = parts[i].substr(4);
      IFSMap m{};
      std::istringstream is(body);
      std::string tok;
      std::getline(is, tok, '/');
      m.ratio = std::stod(tok);
      for (int d = 0; d < dim && std::getline(is, tok, '/'); ++d)
        m.offset[static_cast<std::size_t>(d)] = std::stod(tok);
      maps.push_back(m);
    }
    return make_ifs(dim, std::move(maps));
  }
  throw std::invalid_argument("unknown system descriptor: " + desc);
}

}  // namespace delaylab
