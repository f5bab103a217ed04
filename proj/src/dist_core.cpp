#include "esterr/dist_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "esterr/errors.hpp"
#include "esterr/quadrature.hpp"

namespace esterr {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string fmt_param(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------
// NoiseSpec

NoiseSpec NoiseSpec::gaussian(double mean, double sd) {
  require(std::isfinite(mean) && sd > 0.0 && std::isfinite(sd), ErrorKind::InvalidNoise,
          "gaussian noise needs finite mean and sd > 0");
  NoiseSpec n;
  n.family_ = NoiseFamily::Gaussian;
  n.name_ = "gaussian";
  n.params_ = {mean, sd};
  n.support_ = {-kInf, kInf};
  n.mean_ = mean;
  n.variance_ = sd * sd;
  n.tail_exponent_ = kInf;
  n.scale_ = sd;
  n.mode_ = mean;
  n.window_ = 10.0 * sd;
  n.log_norm_ = -kLogSqrt2Pi - std::log(sd);
  n.flags_ = {.bounded_density = true, .strictly_log_concave = true, .doob = true, .in_l1 = true};
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::laplace(double location, double scale) {
  require(std::isfinite(location) && scale > 0.0 && std::isfinite(scale),
          ErrorKind::InvalidNoise, "laplace noise needs finite location and scale > 0");
  NoiseSpec n;
  n.family_ = NoiseFamily::Laplace;
  n.name_ = "laplace";
  n.params_ = {location, scale};
  n.support_ = {-kInf, kInf};
  n.mean_ = location;
  n.variance_ = 2.0 * scale * scale;
  n.tail_exponent_ = kInf;
  n.scale_ = scale;
  n.mode_ = location;
  // exp(-36) < 1e-15
  n.window_ = 36.0 * scale;
  n.log_norm_ = -std::log(2.0 * scale);
  n.kinks_ = {location};
  n.flags_ = {.bounded_density = true, .strictly_log_concave = false, .doob = false, .in_l1 = true};
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::uniform(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, ErrorKind::InvalidNoise,
          "uniform noise needs a < b (degenerate support)");
  NoiseSpec n;
  n.family_ = NoiseFamily::Uniform;
  n.name_ = "uniform";
  n.params_ = {a, b};
  n.support_ = {a, b};
  n.mean_ = 0.5 * (a + b);
  n.variance_ = (b - a) * (b - a) / 12.0;
  n.tail_exponent_ = kInf;
  n.scale_ = 0.5 * (b - a);
  n.mode_ = 0.5 * (a + b);
  n.window_ = kInf;
  n.log_norm_ = -std::log(b - a);
  n.kinks_ = {a, b};
  n.flags_ = {.bounded_density = true, .strictly_log_concave = false, .doob = false, .in_l1 = true};
  n.validate();
  return n;
}

NoiseSpec NoiseSpec::student_t(double nu) {
  require(nu > 0.0 && std::isfinite(nu), ErrorKind::InvalidNoise, "student_t needs nu > 0");
  NoiseSpec n;
  n.family_ = NoiseFamily::StudentT;
  n.name_ = "student_t";
  n.params_ = {nu};
  n.support_ = {-kInf, kInf};
  n.mean_ = nu > 1.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  n.variance_ = nu > 2.0 ? nu / (nu - 2.0) : kInf;
  n.tail_exponent_ = nu + 1.0;
  n.scale_ = 1.0;
  n.mode_ = 0.0;
  n.window_ = kInf;
  n.log_norm_ = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                0.5 * std::log(nu * std::numbers::pi);
  n.tail_constant_ = std::exp(n.log_norm_ + 0.5 * (nu + 1.0) * std::log(nu));
  n.flags_ = {.bounded_density = true, .strictly_log_concave = false, .doob = false,
              .in_l1 = nu > 1.0};
  n.validate();
  return n;
}

std::string NoiseSpec::describe() const {
  switch (family_) {
    case NoiseFamily::Gaussian:
      return "gaussian(mean=" + fmt_param(params_[0]) + ",sd=" + fmt_param(params_[1]) + ")";
    case NoiseFamily::Laplace:
      return "laplace(location=" + fmt_param(params_[0]) + ",scale=" + fmt_param(params_[1]) +
             ")";
    case NoiseFamily::Uniform:
      return "uniform(a=" + fmt_param(params_[0]) + ",b=" + fmt_param(params_[1]) + ")";
    case NoiseFamily::StudentT:
      return "student_t(nu=" + fmt_param(params_[0]) + ")";
  }
  return name_;
}

double NoiseSpec::log_pdf(double z) const {
  switch (family_) {
    case NoiseFamily::Gaussian: {
      const double u = (z - params_[0]) / params_[1];
      return log_norm_ - 0.5 * u * u;
    }
    case NoiseFamily::Laplace:
      return log_norm_ - std::abs(z - params_[0]) / params_[1];
    case NoiseFamily::Uniform:
      return (z >= params_[0] && z <= params_[1]) ? log_norm_ : -kInf;
    case NoiseFamily::StudentT: {
      const double nu = params_[0];
      return log_norm_ - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    }
  }
  return -kInf;
}

double NoiseSpec::pdf(double z) const { return std::exp(log_pdf(z)); }

double NoiseSpec::sample(std::mt19937_64& rng) const {
  switch (family_) {
    case NoiseFamily::Gaussian:
      return std::normal_distribution<double>(params_[0], params_[1])(rng);
    case NoiseFamily::Laplace: {
      std::uniform_real_distribution<double> u(-0.5, 0.5);
      double v = u(rng);
      while (v == -0.5) v = u(rng);
      const double s = v < 0 ? -1.0 : 1.0;
      return params_[0] - params_[1] * s * std::log1p(-2.0 * std::abs(v));
    }
    case NoiseFamily::Uniform:
      return std::uniform_real_distribution<double>(params_[0], params_[1])(rng);
    case NoiseFamily::StudentT:
      return std::student_t_distribution<double>(params_[0])(rng);
  }
  return 0.0;
}

void NoiseSpec::validate() const {
  std::vector<double> pts{support_.lo};
  for (double k : kinks_) {
    if (support_.contains_open(k)) pts.push_back(k);
  }
  if (support_.contains_open(mode_)) pts.push_back(mode_);
  pts.push_back(support_.hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const double c = mode_;
  auto f = [&](double z) {
    const double p = pdf(z);
    const double d = z - c;
    return quad::Vec<3>{p, p * d, p * d * d};
  };
  quad::Options opt;
  opt.rel_tol = 1e-12;
  const auto r = quad::integrate<3>(f, pts, opt);
  require(std::abs(r.value[0] - 1.0) <= 1e-8, ErrorKind::InvalidNoise,
          describe() + " does not integrate to 1");
  if (std::isfinite(mean_)) {
    const double m = c + r.value[1];
    require(std::abs(m - mean_) <= 1e-6 * std::max(1.0, std::abs(mean_)),
            ErrorKind::InvalidNoise, describe() + " mean inconsistent with its density");
    if (std::isfinite(variance_)) {
      const double v = r.value[2] - r.value[1] * r.value[1];
      require(std::abs(v - variance_) <= 1e-6 * variance_, ErrorKind::InvalidNoise,
              describe() + " variance inconsistent with its density");
    }
  }
}

Concavity check_strict_log_concavity(const NoiseSpec& noise, int grid_n) {
  require(grid_n >= 16, ErrorKind::InvalidArgument, "grid_n must be >= 16");
  const Interval s = noise.support();
  require(!s.empty(), ErrorKind::InvalidNoise, "degenerate noise support");
  Interval w = s;
  if (!std::isfinite(w.lo)) w.lo = noise.mode() - 10.0 * noise.scale();
  if (!std::isfinite(w.hi)) w.hi = noise.mode() + 10.0 * noise.scale();
  require(w.width() > 0.0, ErrorKind::InvalidNoise, "degenerate noise support");

  constexpr double eps_cc = 1e-9;
  bool inconclusive = false;
  int n = grid_n;
  for (int level = 0; level < 4; ++level, n *= 4) {
    const double h = w.width() / static_cast<double>(n + 1);
    for (int i = 1; i + 1 < n; ++i) {
      const double z = w.lo + (i + 1) * h;
      const double d2 = noise.log_pdf(z + h) - 2.0 * noise.log_pdf(z) + noise.log_pdf(z - h);
      if (!std::isfinite(d2)) {
        inconclusive = true;
        continue;
      }
      if (d2 >= eps_cc) return Concavity::False;
      // At the coarsest spacing a flat second difference means log f_Z is affine
      // across a finite span.
      if (level == 0 && d2 >= -eps_cc) return Concavity::False;
      if (d2 >= -eps_cc) inconclusive = true;
    }
  }
  return inconclusive ? Concavity::Inconclusive : Concavity::True;
}

// ---------------------------------------------------------------------------
// PriorSpec

namespace {

void check_continuous(const ContinuousPrior& c) {
  require(!c.domain.empty() && c.domain.finite(), ErrorKind::InvalidPrior,
          c.name + ": integration domain must be finite and non-empty");
  std::vector<double> pts{c.domain.lo, c.domain.hi};
  for (double l : c.landmarks) {
    if (c.domain.contains_open(l)) pts.push_back(l);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::Options opt;
  opt.rel_tol = 1e-12;
  const double total =
      quad::integrate_scalar([&](double x) { return std::exp(c.log_pdf(x)); }, pts, opt);
  require(std::abs(total - 1.0) <= 1e-8, ErrorKind::InvalidPrior,
          c.name + ": density does not integrate to 1");
}

}  // namespace

PriorSpec PriorSpec::discrete(std::vector<Atom> atoms) {
  require(!atoms.empty(), ErrorKind::InvalidPrior, "discrete prior needs at least one atom");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(std::isfinite(atoms[i].location), ErrorKind::InvalidPrior, "atom location not finite");
    require(atoms[i].mass > 0.0, ErrorKind::InvalidPrior, "atom masses must be > 0");
    if (i > 0) {
      require(atoms[i].location > atoms[i - 1].location, ErrorKind::InvalidPrior,
              "atom locations must be distinct");
    }
    total += atoms[i].mass;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorKind::InvalidPrior,
          "atom masses must sum to 1");
  return PriorSpec(DiscretePrior{std::move(atoms)});
}

PriorSpec PriorSpec::point_mass(double location) { return discrete({{location, 1.0}}); }

PriorSpec PriorSpec::binary(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidPrior, "binary prior needs p in (0,1)");
  return discrete({{-1.0, 1.0 - p}, {1.0, p}});
}

PriorSpec PriorSpec::gaussian(double mean, double sd) {
  require(std::isfinite(mean) && sd > 0.0 && std::isfinite(sd), ErrorKind::InvalidPrior,
          "gaussian prior needs sd > 0");
  ContinuousPrior c;
  c.name = "gaussian(mean=" + fmt_param(mean) + ",sd=" + fmt_param(sd) + ")";
  const double ln = -kLogSqrt2Pi - std::log(sd);
  c.log_pdf = [mean, sd, ln](double x) {
    const double u = (x - mean) / sd;
    return ln - 0.5 * u * u;
  };
  c.support = {-kInf, kInf};
  // log density below -800 outside
  c.domain = {mean - 40.0 * sd, mean + 40.0 * sd};
  c.landmarks = {mean, mean - sd, mean + sd, mean - 4 * sd, mean + 4 * sd, mean - 10 * sd,
                 mean + 10 * sd};
  c.bounded_density = true;
  c.continuous_density = true;
  c.sampler = [mean, sd](std::mt19937_64& rng) {
    return std::normal_distribution<double>(mean, sd)(rng);
  };
  c.mean = mean;
  c.variance = sd * sd;
  check_continuous(c);
  return PriorSpec(std::move(c));
}

PriorSpec PriorSpec::uniform(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, ErrorKind::InvalidPrior,
          "uniform prior needs a < b");
  ContinuousPrior c;
  c.name = "uniform(a=" + fmt_param(a) + ",b=" + fmt_param(b) + ")";
  const double ln = -std::log(b - a);
  c.log_pdf = [a, b, ln](double x) { return (x >= a && x <= b) ? ln : -kInf; };
  c.support = {a, b};
  c.domain = {a, b};
  c.landmarks = {a, b};
  c.bounded_density = true;
  c.continuous_density = false;
  c.sampler = [a, b](std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  c.mean = 0.5 * (a + b);
  c.variance = (b - a) * (b - a) / 12.0;
  check_continuous(c);
  return PriorSpec(std::move(c));
}

PriorSpec PriorSpec::beta(double a, double b, double lo, double hi) {
  require(a >= 1.0 && b >= 1.0 && std::isfinite(a) && std::isfinite(b), ErrorKind::InvalidPrior,
          "beta prior needs a, b >= 1 (bounded density)");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::InvalidPrior,
          "beta prior needs lo < hi");
  ContinuousPrior c;
  c.name = "beta(a=" + fmt_param(a) + ",b=" + fmt_param(b) + ",lo=" + fmt_param(lo) +
           ",hi=" + fmt_param(hi) + ")";
  const double width = hi - lo;
  const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) - std::log(width);
  c.log_pdf = [a, b, lo, hi, width, ln](double x) {
    if (!(x >= lo && x <= hi)) return -kInf;
    const double u = (x - lo) / width;
    double v = ln;
    if (a != 1.0) v += (a - 1.0) * std::log(u);
    if (b != 1.0) v += (b - 1.0) * std::log1p(-u);
    return v;
  };
  c.support = {lo, hi};
  c.domain = {lo, hi};
  const double mode = (a + b > 2.0) ? lo + width * (a - 1.0) / (a + b - 2.0) : 0.5 * (lo + hi);
  c.landmarks = {lo, hi, mode};
  c.bounded_density = true;
  c.continuous_density = a > 1.0 && b > 1.0;
  c.sampler = [a, b, lo, width](std::mt19937_64& rng) {
    const double ga = std::gamma_distribution<double>(a, 1.0)(rng);
    const double gb = std::gamma_distribution<double>(b, 1.0)(rng);
    return lo + width * ga / (ga + gb);
  };
  c.mean = lo + width * a / (a + b);
  c.variance = width * width * a * b / ((a + b) * (a + b) * (a + b + 1.0));
  check_continuous(c);
  return PriorSpec(std::move(c));
}

PriorSpec PriorSpec::continuous(std::string name, std::function<double(double)> log_pdf,
                                Interval support, Interval domain, bool bounded_density,
                                bool continuous_density) {
  require(static_cast<bool>(log_pdf), ErrorKind::InvalidPrior, "missing log density");
  ContinuousPrior c;
  c.name = std::move(name);
  c.log_pdf = std::move(log_pdf);
  c.support = support;
  c.domain = domain.intersect(support);
  c.landmarks = {c.domain.lo, c.domain.hi};
  c.bounded_density = bounded_density;
  c.continuous_density = continuous_density;
  check_continuous(c);

  std::vector<double> pts{c.domain.lo, c.domain.hi};
  const auto& lp = c.log_pdf;
  auto f = [&lp](double x) {
    const double p = std::exp(lp(x));
    return quad::Vec<3>{p, p * x, p * x * x};
  };
  const auto r = quad::integrate<3>(f, pts);
  c.mean = r.value[1] / r.value[0];
  c.variance = std::max(0.0, r.value[2] / r.value[0] - c.mean * c.mean);

  // Rejection sampler against a flat envelope over the domain.
  double peak = 0.0;
  for (int i = 0; i <= 4096; ++i) {
    const double x = c.domain.lo + c.domain.width() * i / 4096.0;
    peak = std::max(peak, std::exp(c.log_pdf(x)));
  }
  const double envelope = 1.5 * peak;
  const Interval dom = c.domain;
  auto density = c.log_pdf;
  const bool bounded = bounded_density;
  c.sampler = [dom, envelope, density, bounded](std::mt19937_64& rng) {
    require(bounded, ErrorKind::InvalidPrior, "cannot sample an unbounded custom density");
    std::uniform_real_distribution<double> ux(dom.lo, dom.hi);
    std::uniform_real_distribution<double> uy(0.0, envelope);
    while (true) {
      const double x = ux(rng);
      if (uy(rng) <= std::exp(density(x))) return x;
    }
  };
  return PriorSpec(std::move(c));
}

PriorSpec PriorSpec::mixture(PriorSpec first, PriorSpec second, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::InvalidPrior, "mixture weight must be in [0,1]");
  MixturePrior m;
  m.first = std::make_shared<const PriorSpec>(std::move(first));
  m.second = std::make_shared<const PriorSpec>(std::move(second));
  m.alpha = alpha;
  return PriorSpec(std::move(m));
}

PriorSpec::Kind PriorSpec::kind() const {
  switch (body_.index()) {
    case 0: return Kind::Discrete;
    case 1: return Kind::Continuous;
    default: return Kind::Mixture;
  }
}

Interval PriorSpec::hull() const {
  switch (kind()) {
    case Kind::Discrete: {
      const auto& a = as_discrete().atoms;
      return {a.front().location, a.back().location};
    }
    case Kind::Continuous:
      return as_continuous().support;
    case Kind::Mixture: {
      const auto& m = as_mixture();
      if (m.alpha == 1.0) return m.first->hull();
      if (m.alpha == 0.0) return m.second->hull();
      const Interval h1 = m.first->hull();
      const Interval h2 = m.second->hull();
      return {std::min(h1.lo, h2.lo), std::max(h1.hi, h2.hi)};
    }
  }
  return {};
}

std::string PriorSpec::describe() const {
  switch (kind()) {
    case Kind::Discrete: {
      std::string s = "discrete{";
      const auto& a = as_discrete().atoms;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i > 0) s += ",";
        s += "(" + fmt_param(a[i].location) + ":" + fmt_param(a[i].mass) + ")";
      }
      return s + "}";
    }
    case Kind::Continuous:
      return as_continuous().name;
    case Kind::Mixture: {
      const auto& m = as_mixture();
      return "mixture(alpha=" + fmt_param(m.alpha) + "," + m.first->describe() + "," +
             m.second->describe() + ")";
    }
  }
  return {};
}

double PriorSpec::continuous_mass() const {
  switch (kind()) {
    case Kind::Discrete: return 0.0;
    case Kind::Continuous: return 1.0;
    case Kind::Mixture: {
      const auto& m = as_mixture();
      return m.alpha * m.first->continuous_mass() + (1.0 - m.alpha) * m.second->continuous_mass();
    }
  }
  return 0.0;
}

bool PriorSpec::purely_discrete() const { return continuous_mass() == 0.0; }
bool PriorSpec::purely_continuous() const { return continuous_mass() == 1.0; }

bool PriorSpec::in_support(double x) const {
  switch (kind()) {
    case Kind::Discrete:
      for (const auto& a : as_discrete().atoms) {
        if (a.location == x) return true;
      }
      return false;
    case Kind::Continuous: {
      const auto& c = as_continuous();
      return c.support.contains_closed(x) && c.log_pdf(x) > -kInf;
    }
    case Kind::Mixture: {
      const auto& m = as_mixture();
      return (m.alpha > 0.0 && m.first->in_support(x)) ||
             (m.alpha < 1.0 && m.second->in_support(x));
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Sampling and moments

Draw draw(const PriorSpec& prior, std::mt19937_64& rng) {
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete: {
      const auto& atoms = prior.as_discrete().atoms;
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double acc = 0.0;
      for (const auto& a : atoms) {
        acc += a.mass;
        if (u < acc) return {a.location, std::nullopt};
      }
      return {atoms.back().location, std::nullopt};
    }
    case PriorSpec::Kind::Continuous:
      return {prior.as_continuous().sampler(rng), std::nullopt};
    case PriorSpec::Kind::Mixture: {
      const auto& m = prior.as_mixture();
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (u < m.alpha) return {draw(*m.first, rng).x, 1};
      return {draw(*m.second, rng).x, 2};
    }
  }
  return {};
}

std::vector<double> sample(const PriorSpec& prior, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidArgument, "sample size must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = draw(prior, rng).x;
  return out;
}

std::vector<double> sample(const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::InvalidArgument, "sample size must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = noise.sample(rng);
  return out;
}

Moments moments(const PriorSpec& prior) {
  switch (prior.kind()) {
    case PriorSpec::Kind::Discrete: {
      const auto& atoms = prior.as_discrete().atoms;
      double m = 0.0;
      for (const auto& a : atoms) m += a.mass * a.location;
      double v = 0.0;
      for (const auto& a : atoms) v += a.mass * (a.location - m) * (a.location - m);
      return {m, v};
    }
    case PriorSpec::Kind::Continuous: {
      const auto& c = prior.as_continuous();
      return {c.mean, c.variance};
    }
    case PriorSpec::Kind::Mixture: {
      const auto& mx = prior.as_mixture();
      const Moments a = moments(*mx.first);
      const Moments b = moments(*mx.second);
      const double al = mx.alpha;
      const double d = a.mean - b.mean;
      return {al * a.mean + (1.0 - al) * b.mean,
              al * a.variance + (1.0 - al) * b.variance + al * (1.0 - al) * d * d};
    }
  }
  return {};
}

Moments moments(const NoiseSpec& noise) {
  if (!(noise.tail_exponent() > 3.0) || !std::isfinite(noise.variance())) {
    throw Error(ErrorKind::DivergentMoment, noise.describe() + " has no finite variance");
  }
  return {noise.mean(), noise.variance()};
}

RealizationPath draw_path(const PriorSpec& prior, const NoiseSpec& noise, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  const Draw d = draw(prior, rng);
  RealizationPath p;
  p.x = d.x;
  p.u = d.label;
  p.z = noise.sample(rng);
  p.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------
// Registry

std::vector<NamedNoise> noise_registry() {
  return {
      {"gaussian", NoiseSpec::gaussian()},
      {"laplace", NoiseSpec::laplace()},
      {"uniform", NoiseSpec::uniform()},
      {"student_t3", NoiseSpec::student_t(3.0)},
      {"cauchy", NoiseSpec::student_t(1.0)},
  };
}

std::vector<NamedPrior> prior_registry() {
  return {
      {"binary_sym", PriorSpec::binary(0.5)},
      {"binary_p03", PriorSpec::binary(0.3)},
      {"three_atom", PriorSpec::discrete({{-1.0, 0.25}, {0.5, 0.5}, {2.0, 0.25}})},
      {"gaussian", PriorSpec::gaussian(0.0, 1.0)},
      {"uniform01", PriorSpec::uniform(0.0, 1.0)},
      {"beta22", PriorSpec::beta(2.0, 2.0)},
      {"mix_atom_uniform",
       PriorSpec::mixture(PriorSpec::point_mass(0.0), PriorSpec::uniform(2.0, 3.0), 0.5)},
      {"mix_nested_uniform",
       PriorSpec::mixture(PriorSpec::uniform(0.0, 1.0), PriorSpec::uniform(0.0, 2.0), 0.5)},
  };
}

}  // namespace esterr
