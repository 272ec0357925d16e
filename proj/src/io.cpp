#include "delaylab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace delaylab {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& tok, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open: " + path);
  return is;
}

}  // namespace

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void save_cloud_csv(const PointCloud& cloud, std::ostream& os) {
  os << "# system," << cloud.system << ",seed," << cloud.seed << "\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int d = 0; d < cloud.dim; ++d)
      os << fmt17(cloud.axis[static_cast<std::size_t>(d)][i]) << ',';
    os << fmt17(cloud.weight[i]) << "\n";
  }
}

void save_cloud_csv(const PointCloud& cloud, const std::string& path) {
  auto os = open_out(path);
  save_cloud_csv(cloud, os);
}

PointCloud load_cloud_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# system,", 0) != 0)
    throw DataError("line 1: expected header '# system,<kind>,seed,<seed>'");
  auto head = split(line.substr(2), ',');
  if (head.size() < 4 || head[2] != "seed") throw DataError("line 1: malformed cloud header");
  PointCloud cloud;
  cloud.system = head[1];
  cloud.seed = std::stoull(head[3]);
  SystemSpec spec = parse_system(cloud.system);
  cloud.metric = phase_metric(spec);
  cloud.provenance = "file";
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto toks = split(line, ',');
    if (toks.size() < 2 || toks.size() > 4)
      throw DataError("line " + std::to_string(line_no) + ": expected 1..3 coordinates + weight");
    PhasePoint p;
    p.dim = static_cast<int>(toks.size()) - 1;
    for (int d = 0; d < p.dim; ++d) p[d] = parse_double(toks[static_cast<std::size_t>(d)], line_no);
    cloud.push(p, parse_double(toks.back(), line_no));
  }
  if (cloud.empty()) throw DataError("cloud file holds no points");
  return cloud;
}

PointCloud load_cloud_csv(const std::string& path) {
  auto is = open_in(path);
  return load_cloud_csv(is);
}

void save_embedded_csv(const EmbeddedCloud& ec, std::ostream& os) {
  os << "# embed," << describe(ec.system) << ",observable," << ec.observable_base << ",k," << ec.k
     << ",n_phase," << ec.phase.dim << ",seed," << ec.seed << "\n";
  for (std::size_t i = 0; i < ec.size(); ++i) {
    for (int d = 0; d < ec.phase.dim; ++d)
      os << fmt17(ec.phase.axis[static_cast<std::size_t>(d)][i]) << ',';
    for (int d = 0; d < ec.k; ++d) os << fmt17(ec.u[static_cast<std::size_t>(d)][i]) << ',';
    for (int d = 0; d < ec.k; ++d) os << fmt17(ec.v[static_cast<std::size_t>(d)][i]) << ',';
    os << fmt17(ec.phase.weight[i]) << "\n";
  }
}

void save_embedded_csv(const EmbeddedCloud& ec, const std::string& path) {
  auto os = open_out(path);
  save_embedded_csv(ec, os);
}

EmbeddedCloud load_embedded_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# embed,", 0) != 0)
    throw DataError("line 1: expected header '# embed,...'");
  auto head = split(line.substr(2), ',');
  if (head.size() < 10) throw DataError("line 1: malformed embed header");
  EmbeddedCloud ec;
  ec.system = parse_system(head[1]);
  if (head[2] != "observable" || head[4] != "k" || head[6] != "n_phase" || head[8] != "seed")
    throw DataError("line 1: malformed embed header fields");
  ec.observable_base = head[3];
  ec.k = std::stoi(head[5]);
  int n_phase = std::stoi(head[7]);
  ec.seed = std::stoull(head[9]);
  ec.phase.dim = n_phase;
  ec.phase.metric = phase_metric(ec.system);
  ec.phase.provenance = "file";
  ec.phase.system = describe(ec.system);
  ec.phase.seed = ec.seed;
  std::size_t line_no = 1;
  const std::size_t expected = static_cast<std::size_t>(n_phase) + 2 * static_cast<std::size_t>(ec.k) + 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto toks = split(line, ',');
    if (toks.size() != expected)
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected) + " columns");
    std::size_t c = 0;
    PhasePoint p;
    p.dim = n_phase;
    for (int d = 0; d < n_phase; ++d) p[d] = parse_double(toks[c++], line_no);
    double uu[3], vv[3];
    for (int d = 0; d < ec.k; ++d) uu[d] = parse_double(toks[c++], line_no);
    for (int d = 0; d < ec.k; ++d) vv[d] = parse_double(toks[c++], line_no);
    ec.phase.push(p, parse_double(toks[c], line_no));
    for (int d = 0; d < ec.k; ++d) {
      ec.u[static_cast<std::size_t>(d)].push_back(uu[d]);
      ec.v[static_cast<std::size_t>(d)].push_back(vv[d]);
    }
  }
  if (ec.size() == 0) throw DataError("embed file holds no pairs");
  return ec;
}

EmbeddedCloud load_embedded_csv(const std::string& path) {
  auto is = open_in(path);
  return load_embedded_csv(is);
}

json observable_to_json(const Observable& h) {
  json j;
  j["basis"] = {{"N", h.basis.n_vars}, {"d", h.basis.degree}};
  j["alpha"] = h.alpha;
  j["base"] = h.base_name();
  j["scale"] = {{"center", std::vector<double>(h.basis.center.begin(),
                                               h.basis.center.begin() + h.basis.n_vars)},
                {"halfwidth", std::vector<double>(h.basis.halfwidth.begin(),
                                                  h.basis.halfwidth.begin() + h.basis.n_vars)}};
  return j;
}

Observable observable_from_json(const json& j) {
  int n = j.at("basis").at("N").get<int>();
  int d = j.at("basis").at("d").get<int>();
  MonomialBasis basis = probe_basis(n, 1, d);
  if (j.contains("scale")) {
    auto center = j["scale"].at("center").get<std::vector<double>>();
    auto halfwidth = j["scale"].at("halfwidth").get<std::vector<double>>();
    for (int v = 0; v < n; ++v) {
      basis.center[static_cast<std::size_t>(v)] = center.at(static_cast<std::size_t>(v));
      basis.halfwidth[static_cast<std::size_t>(v)] = halfwidth.at(static_cast<std::size_t>(v));
    }
  }
  Observable h = make_observable(j.at("base").get<std::string>(), std::move(basis));
  auto alpha = j.at("alpha").get<std::vector<double>>();
  if (!alpha.empty()) h = perturb(h, alpha);
  return h;
}

json dimension_to_json(const DimensionEstimate& est) {
  return json{{"method", est.method},
              {"value", est.value},
              {"slope_window", {est.r_min, est.r_max}},
              {"residual", est.residual},
              {"n_scales", est.n_scales},
              {"degraded", est.degraded}};
}

void save_curve_csv(const ExceedanceCurve& curve, std::ostream& os) {
  os << "epsilon,fraction,empty_ball_fraction,delta\n";
  for (std::size_t i = 0; i < curve.eps.size(); ++i)
    os << fmt17(curve.eps[i]) << ',' << fmt17(curve.fraction[i]) << ','
       << fmt17(curve.empty_fraction[i]) << ',' << fmt17(curve.delta) << "\n";
}

ExceedanceCurve load_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "epsilon,fraction,empty_ball_fraction,delta")
    throw DataError("line 1: expected exceedance curve header");
  ExceedanceCurve c;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto toks = split(line, ',');
    if (toks.size() != 4) throw DataError("line " + std::to_string(line_no) + ": expected 4 columns");
    c.eps.push_back(parse_double(toks[0], line_no));
    c.fraction.push_back(parse_double(toks[1], line_no));
    c.empty_fraction.push_back(parse_double(toks[2], line_no));
    c.delta = parse_double(toks[3], line_no);
  }
  return c;
}

json scaling_to_json(const ScalingFit& fit) {
  return json{{"slope", fit.fit.slope},
              {"intercept", fit.fit.intercept},
              {"residual", fit.fit.residual},
              {"n_scales", fit.fit.n_used},
              {"usable", fit.usable},
              {"window", {fit.eps_lo, fit.eps_hi}}};
}

void save_slice_csv(const SliceEstimate& slice, std::ostream& os) {
  for (std::size_t t = 0; t < slice.phase.size(); ++t) {
    for (int d = 0; d < slice.phase.dim; ++d)
      os << fmt17(slice.phase.axis[static_cast<std::size_t>(d)][t]) << ',';
    os << fmt17(slice.phase.weight[t]);
    for (int d = 0; d < slice.k; ++d)
      os << ',' << fmt17(slice.image[static_cast<std::size_t>(d)][t]);
    os << "\n";
  }
}

json slice_sidecar(const SliceEstimate& slice) {
  return json{{"y", slice.y},
              {"delta", slice.delta},
              {"members", slice.phase.size()},
              {"slab_mass", slice.slab_mass}};
}

void save_plot_data(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& path) {
  auto os = open_out(path);
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    os << fmt17(x[i]) << ' ' << fmt17(y[i]) << "\n";
}

void write_text_file(const std::string& path, const std::string& body) {
  auto os = open_out(path);
  os << body;
}

std::string read_text_file(const std::string& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace delaylab
