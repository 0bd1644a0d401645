#include "corrdyn/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "corrdyn/error.hpp"

namespace corrdyn {
namespace {

// Powers of the chart value, arranged so that index a multiplies c_{a,*}:
// direct chart x^a, reciprocal chart u^{deg - a}.
std::vector<cplx> chart_powers(Chart chart, cplx value, int deg) {
  std::vector<cplx> pw(deg + 1);
  cplx p = 1.0;
  for (int k = 0; k <= deg; ++k) {
    const int slot = chart == Chart::Direct ? k : deg - k;
    pw[slot] = p;
    p *= value;
  }
  return pw;
}

double turn_angle(cplx z) {
  if (std::abs(z) == 0.0) return 0.0;
  const double t = std::arg(z);
  return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
}

bool canonical_less(const Root& a, const Root& b) {
  const bool ia = a.point.is_infinity();
  const bool ib = b.point.is_infinity();
  if (ia || ib) return !ia && ib;
  const cplx za = a.point.to_complex();
  const cplx zb = b.point.to_complex();
  const double arg_a = turn_angle(za);
  const double arg_b = turn_angle(zb);
  if (arg_a != arg_b) return arg_a < arg_b;
  return std::abs(za) < std::abs(zb);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

BivarPoly::BivarPoly(std::span<const Monomial> terms, int multiplicity) : multiplicity_(multiplicity) {
  if (multiplicity < 1) throw Error(Errc::InvalidComponent, "multiplicity must be positive");
  for (const auto& t : terms) {
    if (t.z_power < 0 || t.w_power < 0) throw Error(Errc::InvalidComponent, "negative exponent");
    if (t.coeff == cplx(0.0)) continue;
    deg_z_ = std::max(deg_z_, t.z_power);
    deg_w_ = std::max(deg_w_, t.w_power);
  }
  if (deg_z_ < 1 || deg_w_ < 1) {
    throw Error(Errc::InvalidComponent, "component must have deg_z >= 1 and deg_w >= 1 (got deg_z=" +
                                            std::to_string(deg_z_) + ", deg_w=" + std::to_string(deg_w_) + ")");
  }
  table_.assign(static_cast<std::size_t>((deg_z_ + 1) * (deg_w_ + 1)), 0.0);
  for (const auto& t : terms) {
    if (t.coeff == cplx(0.0)) continue;
    table_[t.z_power * (deg_w_ + 1) + t.w_power] += t.coeff;
  }
}

cplx BivarPoly::coeff(int a, int b) const noexcept {
  if (a < 0 || b < 0 || a > deg_z_ || b > deg_w_) return 0.0;
  return table_[a * (deg_w_ + 1) + b];
}

std::vector<Monomial> BivarPoly::terms() const {
  std::vector<Monomial> out;
  for (int a = 0; a <= deg_z_; ++a) {
    for (int b = 0; b <= deg_w_; ++b) {
      if (coeff(a, b) != cplx(0.0)) out.push_back({a, b, coeff(a, b)});
    }
  }
  return out;
}

std::vector<cplx> BivarPoly::fiber_over_z(Chart chart, cplx x) const {
  const auto pw = chart_powers(chart, x, deg_z_);
  std::vector<cplx> out(deg_w_ + 1, 0.0);
  for (int a = 0; a <= deg_z_; ++a) {
    for (int b = 0; b <= deg_w_; ++b) out[b] += coeff(a, b) * pw[a];
  }
  return out;
}

std::vector<cplx> BivarPoly::fiber_over_w(Chart chart, cplx y) const {
  const auto pw = chart_powers(chart, y, deg_w_);
  std::vector<cplx> out(deg_z_ + 1, 0.0);
  for (int a = 0; a <= deg_z_; ++a) {
    for (int b = 0; b <= deg_w_; ++b) out[a] += coeff(a, b) * pw[b];
  }
  return out;
}

double BivarPoly::incidence_residual(const SpherePoint& x, const SpherePoint& y) const noexcept {
  const auto px = chart_powers(x.chart(), x.chart_value(), deg_z_);
  const auto py = chart_powers(y.chart(), y.chart_value(), deg_w_);
  cplx value = 0.0;
  double scale = 0.0;
  for (int a = 0; a <= deg_z_; ++a) {
    for (int b = 0; b <= deg_w_; ++b) {
      const cplx term = coeff(a, b) * px[a] * py[b];
      value += term;
      scale += std::abs(term);
    }
  }
  return scale == 0.0 ? 0.0 : std::abs(value) / scale;
}

int ImageSet::total_multiplicity() const noexcept {
  int n = 0;
  for (const auto& p : points) n += p.multiplicity;
  return n;
}

Correspondence::Correspondence(std::vector<BivarPoly> components, RootOptions root_options)
    : components_(std::move(components)), root_options_(root_options) {
  if (components_.empty()) throw Error(Errc::InvalidComponent, "a correspondence needs at least one component");
  for (const auto& c : components_) {
    const ComponentDegrees cd{c.deg_w(), c.deg_z(), c.multiplicity()};
    degrees_.components.push_back(cd);
    degrees_.d_fwd += cd.multiplicity * cd.lambda;
    degrees_.d_top += cd.multiplicity * cd.delta;
  }
}

Correspondence Correspondence::parse(std::string_view text) {
  std::vector<BivarPoly> comps;
  std::vector<Monomial> terms;
  std::map<std::pair<int, int>, int> seen;
  int multiplicity = 0;
  bool open = false;
  int line_no = 0;

  auto flush = [&]() {
    if (!open) return;
    if (terms.empty()) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": component without coefficients");
    }
    comps.emplace_back(terms, multiplicity);
    terms.clear();
    seen.clear();
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    const std::string where = "line " + std::to_string(line_no);
    try {
      if (tok.size() == 1) {
        flush();
        std::size_t used = 0;
        multiplicity = std::stoi(tok[0], &used);
        if (used != tok[0].size() || multiplicity < 1) throw std::invalid_argument("multiplicity");
        open = true;
      } else if (tok.size() == 4) {
        if (!open) throw Error(Errc::ParseError, where + ": coefficient before multiplicity line");
        std::size_t ua = 0;
        std::size_t ub = 0;
        const int a = std::stoi(tok[0], &ua);
        const int b = std::stoi(tok[1], &ub);
        if (ua != tok[0].size() || ub != tok[1].size() || a < 0 || b < 0) {
          throw std::invalid_argument("exponent");
        }
        const double re = std::stod(tok[2]);
        const double im = std::stod(tok[3]);
        if (seen[{a, b}]++ > 0) throw Error(Errc::ParseError, where + ": duplicate monomial");
        terms.push_back({a, b, cplx(re, im)});
      } else {
        throw Error(Errc::ParseError, where + ": expected 'multiplicity' or 'a b re im'");
      }
    } catch (const std::logic_error&) {
      throw Error(Errc::ParseError, where + ": malformed number in '" + line + "'");
    }
  }
  flush();
  if (comps.empty()) throw Error(Errc::ParseError, "no components found");
  return Correspondence(std::move(comps));
}

Correspondence Correspondence::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Correspondence::to_text() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& c : components_) {
    out << c.multiplicity() << '\n';
    for (const auto& t : c.terms()) {
      out << t.z_power << ' ' << t.w_power << ' ' << t.coeff.real() << ' ' << t.coeff.imag() << '\n';
    }
    out << '\n';
  }
  return out.str();
}

ImageSet Correspondence::images(Direction dir, Chart chart, cplx base) const {
  ImageSet out;
  int generic = 0;
  for (int t = 1; t <= size(); ++t) {
    const auto& comp = components_[t - 1];
    generic += comp.multiplicity() * (dir == Direction::Forward ? comp.deg_w() : comp.deg_z());
    const auto fiber = dir == Direction::Forward ? comp.fiber_over_z(chart, base) : comp.fiber_over_w(chart, base);
    std::vector<Root> rts;
    try {
      rts = roots(fiber, root_options_);
    } catch (const Error& e) {
      if (e.code() != Errc::ZeroPolynomial) throw;
      out.degenerate = true;
      continue;
    }
    std::sort(rts.begin(), rts.end(), canonical_less);
    int index = 1;
    for (int rep = 0; rep < comp.multiplicity(); ++rep) {
      for (const auto& r : rts) {
        if (r.multiplicity > 1) out.degenerate = true;
        out.points.push_back({r.point, t, index, r.multiplicity});
        index += r.multiplicity;
      }
    }
  }
  if (out.total_multiplicity() != generic) out.degenerate = true;
  return out;
}

ImageSet Correspondence::forward_images(Chart chart, cplx x) const { return images(Direction::Forward, chart, x); }
ImageSet Correspondence::backward_images(Chart chart, cplx y) const { return images(Direction::Backward, chart, y); }

ImageSet Correspondence::forward_images(const SpherePoint& x) const {
  return images(Direction::Forward, x.chart(), x.chart_value());
}

ImageSet Correspondence::backward_images(const SpherePoint& y) const {
  return images(Direction::Backward, y.chart(), y.chart_value());
}

ExpansivityResult expansivity_probe(const Correspondence& corr,
                                    std::span<const std::pair<SpherePoint, SpherePoint>> region, int samples,
                                    double probe_scale, double margin) {
  if (samples < 1) throw Error(Errc::InvalidArgument, "samples must be >= 1");
  double worst = 0.0;
  int used = 0;
  for (const auto& [x0, y0] : region) {
    if (used >= samples) break;
    const double d0 = sph_dist(x0, y0);
    if (!(d0 > 0.0) || d0 > probe_scale) continue;
    const auto bx = corr.backward_images(x0);
    const auto by = corr.backward_images(y0);
    double pair_ratio = 0.0;
    for (const auto& px : bx.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& py : by.points) {
        if (py.component != px.component) continue;
        best = std::min(best, sph_dist(px.point, py.point) / d0);
      }
      pair_ratio = std::max(pair_ratio, best);
    }
    worst = std::max(worst, pair_ratio);
    ++used;
  }
  if (used == 0) throw Error(Errc::InsufficientPairs, "no pair closer than the probe scale");
  ExpansivityResult r;
  r.pairs_used = used;
  r.lambda_estimate = worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  r.is_expansive = r.lambda_estimate > 1.0 + margin;
  return r;
}

}  // namespace corrdyn
