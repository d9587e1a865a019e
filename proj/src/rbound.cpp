#include "prb/rbound.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include <json.hpp>

namespace prb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

template <class Field>
Field combine(const std::vector<AnyField>& fields, std::span<const cplx> c) {
  Field out = std::get<Field>(fields.front());
  for (auto& v : out.samples) v *= c[0];
  for (std::size_t n = 1; n < fields.size(); ++n) {
    const auto* f = std::get_if<Field>(&fields[n]);
    if (f == nullptr || f->samples.size() != out.samples.size()) {
      throw ParameterError("fields in a Rademacher sum must share their grids");
    }
    if constexpr (std::is_same_v<Field, BoundaryField>) {
      if (!(f->grid == out.grid)) throw ParameterError("fields in a Rademacher sum must share their grids");
    } else {
      if (!(f->tangential == out.tangential) || !(f->normal == out.normal)) {
        throw ParameterError("fields in a Rademacher sum must share their grids");
      }
    }
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += c[n] * f->samples[i];
  }
  return out;
}

AnyField scaled(const AnyField& f, double c) {
  return std::visit(
      [c](auto field) -> AnyField {
        for (auto& v : field.samples) v *= c;
        return field;
      },
      f);
}

BoundaryField gaussian(const TangentialGrid& grid, double width, int modulation) {
  const double centre = 0.5 * grid.box_length();
  const double k = 2.0 * pi * modulation / grid.box_length();
  return BoundaryField::from_function(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double c : x) r2 += (c - centre) * (c - centre);
    return std::exp(-0.5 * r2 / (width * width)) * std::polar(1.0, k * x[0]);
  });
}

void normalise(BoundaryField& f) {
  const double n = lp_norm(f, 2.0);
  if (n > 0.0) {
    for (auto& v : f.samples) v /= n;
  }
}

}  // namespace

RademacherSampler RademacherSampler::split(std::uint64_t index) const {
  return RademacherSampler(seed_, splitmix64(stream_ * 0xD1B54A32D192ED03ULL + index + 1));
}

std::uint64_t RademacherSampler::next_u64() {
  const std::uint64_t base = splitmix64(seed_ ^ splitmix64(stream_));
  return splitmix64(base + 0x9E3779B97F4A7C15ULL * (counter_++));
}

double RademacherSampler::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

cplx RademacherSampler::next() { return std::polar(1.0, 2.0 * pi * uniform()); }

std::vector<cplx> sample_rademacher(RademacherSampler& sampler, std::size_t count) {
  if (count < 1) throw ParameterError("sample_rademacher: count must be positive");
  std::vector<cplx> out(count);
  for (auto& v : out) v = sampler.next();
  return out;
}

AnyField linear_combination(const std::vector<AnyField>& fields, std::span<const cplx> coefficients) {
  if (fields.empty()) throw ParameterError("linear combination of no fields");
  if (coefficients.size() != fields.size()) throw ParameterError("coefficient count does not match field count");
  if (std::holds_alternative<BoundaryField>(fields.front())) return combine<BoundaryField>(fields, coefficients);
  return combine<HalfSpaceField>(fields, coefficients);
}

EpsEstimate eps_p_norm(const std::vector<AnyField>& fields, double p, const NormSpec& norm, int trials,
                       RademacherSampler& sampler, bool allow_exact) {
  if (fields.empty()) throw ParameterError("eps_p_norm: no fields");
  if (trials < 1) throw ParameterError("eps_p_norm: trials must be positive");
  if (!(p > 0.0) || std::isinf(p)) throw ParameterError("eps_p_norm: p must be positive and finite");
  if (fields.size() == 1) return {evaluate_norm(norm, fields.front()), 0.0, 0, true};
  if (allow_exact && p == 2.0 && norm.is_l2()) {
    std::vector<cplx> ones(fields.size(), 1.0);
    linear_combination(fields, ones);  // grid consistency check
    double acc = 0.0;
    for (const auto& f : fields) acc += std::pow(evaluate_norm(norm, f), 2);
    return {std::sqrt(acc), 0.0, 0, true};
  }
  double sum = 0.0, sum_sq = 0.0;
  std::vector<cplx> eps(fields.size());
  for (int r = 0; r < trials; ++r) {
    for (auto& e : eps) e = sampler.next();
    const double v = std::pow(evaluate_norm(norm, linear_combination(fields, eps)), p);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / trials;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - trials * mean * mean) / (trials - 1)) : 0.0;
  const double value = std::pow(mean, 1.0 / p);
  // Delta method for mean^{1/p}.
  const double se = mean > 0.0 ? value / (p * mean) * std::sqrt(var / trials) : 0.0;
  return {value, se, trials, false};
}

RBoundEstimate rbound_lower(const std::vector<OperatorEntry>& ops, const std::vector<AnyField>& inputs,
                            const RBoundOptions& options, const RademacherSampler& sampler) {
  if (ops.empty()) throw ParameterError("rbound_lower: empty operator family");
  if (inputs.empty()) throw ParameterError("rbound_lower: empty input list");
  if (options.trials < 1 || options.restarts < 0 || options.max_family < 1) {
    throw ParameterError("rbound_lower: trials, restarts and family size must be positive");
  }
  options.in_norm.validate();
  options.out_norm.validate();

  std::vector<std::vector<std::optional<AnyField>>> images(ops.size(), std::vector<std::optional<AnyField>>(inputs.size()));
  auto image = [&](std::size_t j, std::size_t i) -> const AnyField& {
    auto& slot = images[j][i];
    if (!slot) slot = ops[j].apply(inputs[i]);
    return *slot;
  };
  std::vector<double> in_norms(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) in_norms[i] = evaluate_norm(options.in_norm, inputs[i]);

  RBoundEstimate best;
  best.trials = options.trials;
  best.restarts = options.restarts;
  best.seed = sampler.seed();
  for (std::size_t j = 0; j < ops.size(); ++j) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!(in_norms[i] > 0.0)) continue;
      const double ratio = evaluate_norm(options.out_norm, image(j, i)) / in_norms[i];
      if (ratio > best.value) {
        best.value = ratio;
        best.std_error = 0.0;
      }
    }
  }
  best.singleton_best = best.value;

  for (int r = 0; r < options.restarts; ++r) {
    RademacherSampler draw = sampler.split(static_cast<std::uint64_t>(r));
    const std::size_t n = 1 + draw.next_u64() % static_cast<std::uint64_t>(options.max_family);
    std::vector<AnyField> xs, ys;
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t j = draw.next_u64() % ops.size();
      const std::size_t i = draw.next_u64() % inputs.size();
      const double weight = 0.1 + 0.9 * draw.uniform();
      xs.push_back(scaled(inputs[i], weight));
      ys.push_back(scaled(image(j, i), weight));
    }
    RademacherSampler num_stream = draw.split(1);
    RademacherSampler den_stream = draw.split(2);
    const auto num = eps_p_norm(ys, options.p, options.out_norm, options.trials, num_stream);
    const auto den = eps_p_norm(xs, options.p, options.in_norm, options.trials, den_stream);
    if (!(den.value > 0.0)) continue;
    const double ratio = num.value / den.value;
    if (ratio > best.value) {
      best.value = ratio;
      const double rel_n = num.value > 0.0 ? num.std_error / num.value : 0.0;
      const double rel_d = den.std_error / den.value;
      best.std_error = ratio * std::hypot(rel_n, rel_d);
    }
  }
  return best;
}

std::vector<BoundaryField> probe_dictionary(const TangentialGrid& grid) {
  std::vector<BoundaryField> out;
  const int n = grid.points_per_dim();
  const int dim = grid.dim();
  auto add_mode = [&](int k) {
    std::vector<int> w(dim, 0);
    w[0] = k;
    out.push_back(BoundaryField::mode(grid, mode_index(grid, w)));
  };
  add_mode(0);
  for (int k = 1; k <= n / 2; k *= 2) {
    if (k < n / 2) add_mode(k);
    add_mode(-k);
  }
  const double L = grid.box_length();
  for (double width : {L / 8.0, L / 32.0, L / 128.0}) out.push_back(gaussian(grid, width, 0));
  for (int j = 0, k = 1; j < 8 && k < n / 2; ++j, k *= 2) out.push_back(gaussian(grid, L / 16.0, k));
  for (auto& f : out) normalise(f);
  return out;
}

DecayFit decay_fit(const ScanResult& scan, FitAbscissa abscissa) {
  if (scan.rows.size() < 5) throw ParameterError("decay_fit: at least five rows are required");
  const std::size_t n = scan.rows.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = scan.rows[i];
    if (!(row.norm > 0.0) || !std::isfinite(row.norm)) throw ParameterError("decay_fit: norms must be positive");
    if (!(row.abs_mu > 0.0) && abscissa == FitAbscissa::modulus) {
      throw ParameterError("decay_fit: |mu| must be positive for a modulus fit");
    }
    xs[i] = abscissa == FitAbscissa::bracket ? 0.5 * std::log1p(row.abs_mu * row.abs_mu) : std::log(row.abs_mu);
    ys[i] = std::log(row.norm);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("decay_fit: abscissae must not all coincide");
  DecayFit fit;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (my + fit.slope * (xs[i] - mx));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

void write_scan_csv(std::ostream& os, const ScanResult& scan, const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  os << "abs_mu,arg_mu,norm,slope,residual,seed\n";
  os << std::setprecision(17);
  for (const auto& row : scan.rows) {
    os << row.abs_mu << ',' << row.arg_mu << ',' << row.norm << ',' << scan.slope << ',' << scan.residual << ','
       << scan.seed << '\n';
  }
  os << "# slope=" << scan.slope << " residual=" << scan.residual << '\n';
}

void write_scan_jsonl(std::ostream& os, const ScanResult& scan, const std::string& config_json,
                      const std::string& version) {
  using nlohmann::json;
  json head{{"schema_version", scan_schema_version}, {"record", "header"}, {"version", version},
            {"config", json::parse(config_json)}, {"metadata", scan.metadata}};
  os << head.dump() << '\n';
  for (const auto& row : scan.rows) {
    json r{{"schema_version", scan_schema_version},
           {"record", "row"},
           {"abs_mu", row.abs_mu},
           {"arg_mu", row.arg_mu},
           {"norm", row.norm},
           {"seed", scan.seed}};
    os << r.dump() << '\n';
  }
  json tail{{"schema_version", scan_schema_version},
            {"record", "fit"},
            {"slope", scan.slope},
            {"residual", scan.residual},
            {"seed", scan.seed}};
  os << tail.dump() << '\n';
}

}  // namespace prb
