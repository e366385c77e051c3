#include "fabcr/fab_nef.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "fabcr/errors.hpp"
#include "fabcr/specfun.hpp"

namespace fabcr {

namespace sf = specfun;

namespace {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::fabs(t))); }

double log_factorial(int k) { return sf::log_gamma(k + 1.0); }

double parse_number(std::string_view text, std::string_view spec) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("family spec '{}': bad number '{}'", spec, text));
  return v;
}

int parse_count(std::string_view text, std::string_view spec) {
  const double v = parse_number(text, spec);
  if (v != std::floor(v) || v < 1 || v > 1e6)
    throw std::invalid_argument(fmt::format("family spec '{}': '{}' is not a positive integer", spec, text));
  return static_cast<int>(v);
}

// Compositions of n into k non-negative parts, lexicographic.
std::vector<NefPoint> compositions(int n, int k) {
  std::vector<NefPoint> out;
  NefPoint cur(k, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == k - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

// Support of f_η, truncated for the Poisson family.
std::vector<NefPoint> support_for(const NefModel& model, const std::vector<double>& eta, const AcceptanceOptions& opts) {
  const NefFamily& fam = model.family();
  if (const auto* b = std::get_if<BinomialBeta>(&fam)) {
    std::vector<NefPoint> s;
    for (int y = 0; y <= b->n; ++y) s.push_back({y});
    return s;
  }
  if (const auto* m = std::get_if<MultinomialDirichlet>(&fam)) return compositions(m->n, static_cast<int>(m->a.size()));
  const double rate = std::exp(eta[0]);
  // Stop once P(Y > y) <= tail, bounded by p(y+1) / (1 - rate/(y+2)).
  const double log_tail = std::log(opts.tail);
  int y = 0;
  double logp = -rate;
  for (;; ++y) {
    if (y > 0) logp += eta[0] - std::log(static_cast<double>(y));
    if (static_cast<double>(y) + 2.0 > 2.0 * rate) {
      const double log_next = logp + eta[0] - std::log(y + 1.0);
      if (log_next - std::log1p(-rate / (y + 2.0)) <= log_tail) break;
    }
    if (y > 100000000) throw NumericalError("poisson support truncation runaway", rate);
  }
  const int ymax = static_cast<int>(std::ceil(opts.support_scale * (y + 1))) - 1;
  std::vector<NefPoint> s;
  s.reserve(ymax + 1);
  for (int v = 0; v <= ymax; ++v) s.push_back({v});
  return s;
}

double dot_counts(const std::vector<double>& eta, const NefPoint& y) {
  double d = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) d += eta[j] * y[j];
  return d;
}

struct Ranked {
  double lam;
  double mass;
  std::size_t index;
};

struct RankedSupport {
  std::vector<NefPoint> points;
  std::vector<Ranked> order;  // sorted by λ_η, then support index
  double k_alpha = 0.0;
  std::size_t cut = 0;  // order[0, cut) are members
  double coverage = 0.0;
};

RankedSupport rank_support(const NefModel& model, const std::vector<double>& eta, double alpha,
                           const AcceptanceOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  RankedSupport rs;
  rs.points = support_for(model, eta, opts);
  const double psi = model.psi(eta);
  rs.order.reserve(rs.points.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rs.points.size(); ++i) {
    const NefPoint& y = rs.points[i];
    const double ety = dot_counts(eta, y);
    const double mass = std::exp(model.log_pmf(eta, y));
    rs.order.push_back({model.lambda(y) - ety + psi, mass, i});
    total += mass;
  }
  if (total < 1.0 - alpha)
    throw NumericalError("acceptance_set: truncated support carries too little mass", eta[0],
                         fmt::format("mass={} alpha={}", total, alpha));
  std::sort(rs.order.begin(), rs.order.end(), [](const Ranked& a, const Ranked& b) {
    return a.lam < b.lam || (a.lam == b.lam && a.index < b.index);
  });
  double cum = 0.0;
  std::size_t i = 0;
  for (; i < rs.order.size(); ++i) {
    cum += rs.order[i].mass;
    if (cum >= 1.0 - alpha) break;
  }
  if (i == rs.order.size()) i = rs.order.size() - 1;
  rs.k_alpha = rs.order[i].lam;
  const double tie = 1e-10 * std::max(1.0, std::fabs(rs.k_alpha));
  std::size_t cut = i + 1;
  while (cut < rs.order.size() && rs.order[cut].lam <= rs.k_alpha + tie) {
    cum += rs.order[cut].mass;
    ++cut;
  }
  rs.cut = cut;
  rs.coverage = cum;
  return rs;
}

bool member_of(const RankedSupport& rs, const NefPoint& y) {
  for (std::size_t i = 0; i < rs.cut; ++i)
    if (rs.points[rs.order[i].index] == y) return true;
  return false;
}

std::vector<double> eta_hat_point(const NefModel& model, const NefPoint& y) {
  return model.grad_lambda(std::vector<double>(y.begin(), y.end()));
}

void scalar_intervals(NefRegion& r) {
  std::size_t i = 0;
  const std::size_t n = r.member.size();
  while (i < n) {
    if (!r.member[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && r.member[j + 1]) ++j;
    r.intervals.push_back({r.grid[i][0], r.grid[j][0]});
    i = j + 1;
  }
  r.components = static_cast<int>(r.intervals.size());
}

// Connected components of member cells on the barycentric lattice; moving
// one unit of mass between two coordinates is a step.
int lattice_components(const std::vector<NefPoint>& cells, const std::vector<char>& member, int scale) {
  const int k = static_cast<int>(cells.front().size());
  auto key = [&](const NefPoint& c) {
    long long v = 0;
    for (int j = 0; j < k; ++j) v = v * (scale + 1) + c[j];
    return v;
  };
  std::unordered_map<long long, std::size_t> index;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (member[i]) index.emplace(key(cells[i]), i);
  std::vector<char> seen(cells.size(), 0);
  int comps = 0;
  for (std::size_t s = 0; s < cells.size(); ++s) {
    if (!member[s] || seen[s]) continue;
    ++comps;
    std::deque<std::size_t> queue{s};
    seen[s] = 1;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          if (a == b) continue;
          NefPoint nb = cells[cur];
          ++nb[a];
          --nb[b];
          if (nb[b] < 1) continue;
          const auto it = index.find(key(nb));
          if (it != index.end() && !seen[it->second]) {
            seen[it->second] = 1;
            queue.push_back(it->second);
          }
        }
    }
  }
  return comps;
}

}  // namespace

NefModel::NefModel(NefFamily family) : family_(std::move(family)) {
  if (const auto* b = std::get_if<BinomialBeta>(&family_)) {
    if (b->n < 1 || !(b->a > 0) || !(b->b > 0)) throw std::invalid_argument("binomial: need n >= 1, a > 0, b > 0");
  } else if (const auto* p = std::get_if<PoissonGamma>(&family_)) {
    if (!(p->a > 0) || !(p->p > 0 && p->p < 1)) throw std::invalid_argument("poisson: need a > 0, p in (0,1)");
  } else {
    const auto& m = std::get<MultinomialDirichlet>(family_);
    if (m.n < 1) throw std::invalid_argument("multinomial: need n >= 1");
    if (m.a.size() < 2 || m.a.size() > 4) throw std::invalid_argument("multinomial: need 2 <= k <= 4");
    for (double a : m.a)
      if (!(a > 0)) throw std::invalid_argument("multinomial: Dirichlet weights must be positive");
  }
}

NefModel NefModel::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  std::vector<std::pair<std::string, std::string_view>> kv;
  if (colon != std::string_view::npos) {
    std::string_view body = spec.substr(colon + 1);
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = body.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw std::invalid_argument(fmt::format("family spec '{}': expected key=value, got '{}'", spec, item));
      kv.emplace_back(std::string(item.substr(0, eq)), item.substr(eq + 1));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  }
  auto get = [&](const std::string& key) -> std::string_view {
    for (auto it = kv.begin(); it != kv.end(); ++it)
      if (it->first == key) {
        const std::string_view v = it->second;
        kv.erase(it);
        return v;
      }
    throw std::invalid_argument(fmt::format("family spec '{}': missing '{}'", spec, key));
  };
  auto finish = [&](NefFamily fam) {
    if (!kv.empty())
      throw std::invalid_argument(fmt::format("family spec '{}': unexpected key '{}'", spec, kv.front().first));
    return NefModel(std::move(fam));
  };
  if (name == "binom") {
    const int n = parse_count(get("n"), spec);
    const double a = parse_number(get("a"), spec);
    return finish(BinomialBeta{n, a, parse_number(get("b"), spec)});
  }
  if (name == "poisson") {
    const double a = parse_number(get("a"), spec);
    return finish(PoissonGamma{a, parse_number(get("p"), spec)});
  }
  if (name == "multinom") {
    const int n = parse_count(get("n"), spec);
    const bool has_k = std::any_of(kv.begin(), kv.end(), [](const auto& p) { return p.first == "k"; });
    std::vector<double> a;
    if (has_k) {
      const int k = parse_count(get("k"), spec);
      a.assign(k, parse_number(get("a"), spec));
    } else {
      std::string_view list = get("a");
      while (true) {
        const auto bar = list.find('|');
        a.push_back(parse_number(list.substr(0, bar), spec));
        if (bar == std::string_view::npos) break;
        list.remove_prefix(bar + 1);
      }
    }
    return finish(MultinomialDirichlet{n, a});
  }
  throw std::invalid_argument(fmt::format("unknown family '{}'", name));
}

std::string NefModel::spec() const {
  if (const auto* b = std::get_if<BinomialBeta>(&family_)) return fmt::format("binom:n={},a={},b={}", b->n, b->a, b->b);
  if (const auto* p = std::get_if<PoissonGamma>(&family_)) return fmt::format("poisson:a={},p={}", p->a, p->p);
  const auto& m = std::get<MultinomialDirichlet>(family_);
  return fmt::format("multinom:n={},a={}", m.n, fmt::join(m.a, "|"));
}

int NefModel::eta_dim() const {
  if (const auto* m = std::get_if<MultinomialDirichlet>(&family_)) return static_cast<int>(m->a.size()) - 1;
  return 1;
}

int NefModel::point_dim() const {
  if (const auto* m = std::get_if<MultinomialDirichlet>(&family_)) return static_cast<int>(m->a.size());
  return 1;
}

void NefModel::check_point(const NefPoint& y) const {
  if (static_cast<int>(y.size()) != point_dim())
    throw std::domain_error(fmt::format("observation needs {} count(s)", point_dim()));
  for (int v : y)
    if (v < 0) throw std::domain_error("counts must be non-negative");
  if (const auto* b = std::get_if<BinomialBeta>(&family_)) {
    if (y[0] > b->n) throw std::domain_error("binomial count exceeds n");
  } else if (const auto* m = std::get_if<MultinomialDirichlet>(&family_)) {
    if (std::accumulate(y.begin(), y.end(), 0) != m->n) throw std::domain_error("multinomial counts must sum to n");
  }
}

double NefModel::lambda(const std::vector<double>& y) const {
  if (const auto* b = std::get_if<BinomialBeta>(&family_)) {
    const double v = y.at(0);
    if (!(v > -b->a && v < b->b + b->n)) throw std::domain_error("binomial lambda: y outside (-a, b+n)");
    return sf::log_beta(b->a + v, b->b + b->n - v) - sf::log_beta(b->a, b->b);
  }
  if (const auto* p = std::get_if<PoissonGamma>(&family_)) {
    const double v = y.at(0);
    if (!(v > -p->a)) throw std::domain_error("poisson lambda: y must exceed -a");
    return sf::log_gamma(p->a + v) - sf::log_gamma(p->a) + v * std::log1p(-p->p) + p->a * std::log(p->p);
  }
  const auto& m = std::get<MultinomialDirichlet>(family_);
  const std::size_t k = m.a.size();
  if (y.size() != k) throw std::domain_error("multinomial lambda: need k counts");
  double sum_a = 0.0, out = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(m.a[j] + y[j] > 0)) throw std::domain_error("multinomial lambda: a_j + y_j must be positive");
    out += sf::log_gamma(m.a[j] + y[j]) - sf::log_gamma(m.a[j]);
    sum_a += m.a[j];
  }
  return out - sf::log_gamma(sum_a + m.n) + sf::log_gamma(sum_a);
}

double NefModel::lambda(const NefPoint& y) const { return lambda(std::vector<double>(y.begin(), y.end())); }

std::vector<double> NefModel::grad_lambda(const std::vector<double>& y) const {
  if (const auto* b = std::get_if<BinomialBeta>(&family_))
    return {sf::digamma(b->a + y.at(0)) - sf::digamma(b->b + b->n - y.at(0))};
  if (const auto* p = std::get_if<PoissonGamma>(&family_)) return {sf::digamma(p->a + y.at(0)) + std::log1p(-p->p)};
  const auto& m = std::get<MultinomialDirichlet>(family_);
  const std::size_t k = m.a.size();
  std::vector<double> g(k - 1);
  const double last = sf::digamma(m.a[k - 1] + y.at(k - 1));
  for (std::size_t j = 0; j + 1 < k; ++j) g[j] = sf::digamma(m.a[j] + y.at(j)) - last;
  return g;
}

double NefModel::psi(const std::vector<double>& eta) const {
  if (const auto* b = std::get_if<BinomialBeta>(&family_)) return b->n * softplus(eta.at(0));
  if (std::holds_alternative<PoissonGamma>(family_)) return std::exp(eta.at(0));
  const auto& m = std::get<MultinomialDirichlet>(family_);
  double top = 0.0;
  for (double e : eta) top = std::max(top, e);
  double s = std::exp(-top);
  for (double e : eta) s += std::exp(e - top);
  return m.n * (top + std::log(s));
}

double NefModel::log_pmf(const std::vector<double>& eta, const NefPoint& y) const {
  double log_h;
  if (const auto* b = std::get_if<BinomialBeta>(&family_)) {
    log_h = log_factorial(b->n) - log_factorial(y[0]) - log_factorial(b->n - y[0]);
  } else if (std::holds_alternative<PoissonGamma>(family_)) {
    log_h = -log_factorial(y[0]);
  } else {
    const auto& m = std::get<MultinomialDirichlet>(family_);
    log_h = log_factorial(m.n);
    for (int v : y) log_h -= log_factorial(v);
  }
  return log_h + dot_counts(eta, y) - psi(eta);
}

std::vector<double> NefModel::mean_map(const std::vector<double>& eta) const {
  if (std::holds_alternative<BinomialBeta>(family_)) return {1.0 / (1.0 + std::exp(-eta.at(0)))};
  if (std::holds_alternative<PoissonGamma>(family_)) return {std::exp(eta.at(0))};
  double top = 0.0;
  for (double e : eta) top = std::max(top, e);
  std::vector<double> th(eta.size() + 1);
  double s = 0.0;
  for (std::size_t j = 0; j < eta.size(); ++j) s += th[j] = std::exp(eta[j] - top);
  s += th.back() = std::exp(-top);
  for (double& v : th) v /= s;
  return th;
}

std::vector<double> NefModel::eta_of(const std::vector<double>& theta) const {
  if (std::holds_alternative<BinomialBeta>(family_)) return {std::log(theta.at(0)) - std::log1p(-theta.at(0))};
  if (std::holds_alternative<PoissonGamma>(family_)) return {std::log(theta.at(0))};
  std::vector<double> eta(theta.size() - 1);
  const double last = std::log(theta.back());
  for (std::size_t j = 0; j < eta.size(); ++j) eta[j] = std::log(theta[j]) - last;
  return eta;
}

FabEstimate fab_estimator(const NefModel& model, const NefPoint& y) {
  model.check_point(y);
  FabEstimate est;
  est.eta_hat = eta_hat_point(model, y);
  est.theta_hat = model.mean_map(est.eta_hat);
  return est;
}

DiscreteAcceptanceSet acceptance_set(const NefModel& model, const std::vector<double>& eta, double alpha,
                                     const AcceptanceOptions& opts) {
  const RankedSupport rs = rank_support(model, eta, alpha, opts);
  DiscreteAcceptanceSet out;
  out.eta = eta;
  out.k_alpha = rs.k_alpha;
  out.attained_coverage = rs.coverage;
  for (std::size_t i = 0; i < rs.cut; ++i) out.members.push_back(rs.points[rs.order[i].index]);
  return out;
}

bool nef_region_contains(const NefModel& model, const NefPoint& y, const std::vector<double>& eta, double alpha,
                         const AcceptanceOptions& opts) {
  return member_of(rank_support(model, eta, alpha, opts), y);
}

NefRegion confidence_region_nef(const NefModel& model, const NefPoint& y, double alpha, const NefGridSpec& spec) {
  model.check_point(y);
  NefRegion r;
  r.y = y;
  r.alpha = alpha;
  r.focal = fab_estimator(model, y);
  r.focal_member = nef_region_contains(model, y, r.focal.eta_hat, alpha, spec.acceptance);

  const NefFamily& fam = model.family();
  std::vector<NefPoint> cells;
  int scale = 0;
  if (std::holds_alternative<BinomialBeta>(fam)) {
    const double step = spec.step > 0 ? spec.step : 1e-4;
    const auto n = static_cast<long long>(std::llround(1.0 / step));
    for (long long i = 1; i < n; ++i) r.grid.push_back({static_cast<double>(i) / static_cast<double>(n)});
  } else if (std::holds_alternative<PoissonGamma>(fam)) {
    const double step = spec.step > 0 ? spec.step : 1e-3;
    const double top = spec.theta_max > 0 ? spec.theta_max : y[0] + 20.0 * std::sqrt(y[0] + 1.0) + 30.0;
    const double l0 = std::log(spec.theta_min), l1 = std::log(top);
    const auto n = static_cast<long long>(std::ceil((l1 - l0) / step));
    for (long long i = 0; i <= n; ++i) r.grid.push_back({std::exp(l0 + static_cast<double>(i) * step)});
  } else {
    const double step = spec.step > 0 ? spec.step : 0.01;
    scale = static_cast<int>(std::lround(1.0 / step));
    const int k = model.point_dim();
    for (const NefPoint& c : compositions(scale - k, k)) {
      NefPoint cell = c;
      for (int& v : cell) v += 1;  // strictly inside the simplex
      std::vector<double> th(k);
      for (int j = 0; j < k; ++j) th[j] = static_cast<double>(cell[j]) / scale;
      cells.push_back(cell);
      r.grid.push_back(th);
    }
  }
  r.member.assign(r.grid.size(), 0);
  for_each_index(r.grid.size(), spec.exec, [&](std::size_t i) {
    r.member[i] = nef_region_contains(model, y, model.eta_of(r.grid[i]), alpha, spec.acceptance) ? 1 : 0;
  });
  if (cells.empty())
    scalar_intervals(r);
  else
    r.components = lattice_components(cells, r.member, scale);
  return r;
}

}  // namespace fabcr
