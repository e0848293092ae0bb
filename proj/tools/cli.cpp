#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksphere/approximation.hpp"
#include "ksphere/exp_sums.hpp"
#include "ksphere/gauss_sums.hpp"
#include "ksphere/lattice_sphere.hpp"
#include "ksphere/maximal.hpp"
#include "ksphere/surface_measure.hpp"

namespace ksphere::cli {

namespace {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------- formatting ----------

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_complex(Complex z) {
  return fmt_double(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt_double(std::abs(z.imag())) + "i";
}

json big(const BigInt& v) {
  if (v.fits_slong_p()) return static_cast<std::int64_t>(v.get_si());
  return to_string(v);
}

json cplx(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

bool is_scalar(const json& j) { return !j.is_object() && !j.is_array(); }

void dump(std::string& s, const json& j, int level) {
  const std::string pad(2 * (level + 1), ' '), close(2 * level, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        s += "{}";
        return;
      }
      s += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) s += ",\n";
        first = false;
        s += pad + json(key).dump() + ": ";
        dump(s, value, level + 1);
      }
      s += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        s += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      s += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) s += flat ? ", " : ",\n";
        first = false;
        if (!flat) s += pad;
        dump(s, value, level + 1);
      }
      s += flat ? "]" : "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      s += std::isfinite(v) ? fmt_double(v) : "null";
      return;
    }
    default:
      s += j.dump();
  }
}

std::string to_json_text(const json& j) {
  std::string s;
  dump(s, j, 0);
  return s + "\n";
}

std::string csv_cell(const json& v) {
  switch (v.type()) {
    case json::value_t::null:
      return "";
    case json::value_t::number_float:
      return fmt_double(v.get<double>());
    case json::value_t::string: {
      const auto str = v.get<std::string>();
      if (str.find_first_of(",\"\n") == std::string::npos) return str;
      std::string q = "\"";
      for (char c : str) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    default:
      return v.dump();
  }
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  std::string csv() const {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_cell(row[i]);
      s += "\n";
    }
    return s;
  }
};

struct Output {
  json doc = json::object();
  Table table;
  std::optional<std::string> text;
  std::string default_format = "json";
  std::optional<GridFunction> grid;
};

// ---------- shared option groups ----------

struct KD {
  int k = 2;
  int d = 3;
};

void add_kd(CLI::App* app, KD& kd, int k, int d) {
  kd.k = k;
  kd.d = d;
  app->add_option("--k", kd.k, "degree k");
  app->add_option("--d", kd.d, "dimension d");
}

std::vector<std::int64_t> resolve_lambdas(const std::vector<std::int64_t>& list, std::int64_t lo, std::int64_t hi) {
  if (!list.empty()) return list;
  if (lo < 1 || hi < lo) throw DomainError("lambda range must satisfy 1 <= lambda-min <= lambda-max");
  std::vector<std::int64_t> out;
  for (std::int64_t l = lo; l <= hi; ++l) out.push_back(l);
  return out;
}

struct SeqOpts {
  std::string kind;
  double base = 2.0;
  double v = 1.5;
  std::vector<std::int64_t> members;
  std::int64_t cutoff = 0;

  RadiusSequence build(int k, int d) const {
    if (kind == "full") return acceptable_radii(k, d, cutoff);
    if (kind == "lacunary") return build_sequence(Lacunary{base}, k, d, cutoff);
    if (kind == "superlacunary") return build_sequence(Superlacunary{v}, k, d, cutoff);
    return build_sequence(CustomSequence{members}, k, d, cutoff);
  }
};

void add_sequence(CLI::App* app, SeqOpts& s, const std::string& kind, std::int64_t cutoff, const char* cutoff_flag) {
  s.kind = kind;
  s.cutoff = cutoff;
  app->add_option("--kind", s.kind, "radius sequence")
      ->check(CLI::IsMember({"full", "lacunary", "superlacunary", "custom"}));
  app->add_option("--base", s.base, "lacunary ratio of consecutive power values");
  app->add_option("--v", s.v, "superlacunary exponent v");
  app->add_option("--members", s.members, "custom power values")->delimiter(',');
  app->add_option(cutoff_flag, s.cutoff, "largest power value in the sequence");
}

json sequence_json(const RadiusSequence& seq) {
  return json{{"label", seq.label}, {"size", seq.members.size()}};
}

struct FuncOpts {
  std::string kind = "delta";
  std::string input;
  std::int64_t side = 16;
  std::int64_t width = 4;
  double density = 0.25;
  std::uint64_t seed = 1;

  GridFunction build(int d) const;
};

void add_function(CLI::App* app, FuncOpts& f, const std::string& kind, std::int64_t side) {
  f.kind = kind;
  f.side = side;
  app->add_option("--f", f.kind, "input function")
      ->check(CLI::IsMember({"delta", "box", "random", "indicator", "ones"}));
  app->add_option("--input", f.input, "read the function from a .f64 file with a .f64.json header");
  app->add_option("--side", f.side, "torus side M");
  app->add_option("--width", f.width, "box width");
  app->add_option("--density", f.density, "inclusion probability for random indicators");
  app->add_option("--seed", f.seed, "random seed");
}

GridFunction read_grid(const std::string& path, int d) {
  std::ifstream hs(path + ".json");
  if (!hs) throw IoError("cannot open header " + path + ".json");
  json header;
  try {
    header = json::parse(hs);
  } catch (const json::exception& e) {
    throw IoError("bad header " + path + ".json: " + e.what());
  }
  if (header.value("dtype", "") != "float64" || header.value("order", "") != "row-major") {
    throw DomainError("grid header must declare dtype float64 and order row-major");
  }
  const int dim = header.at("dimension").get<int>();
  if (dim != d) throw DomainError("grid dimension " + std::to_string(dim) + " does not match --d");
  auto f = GridFunction::zeros(dim, header.at("side").get<std::int64_t>());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(double))) {
    throw IoError("short read from " + path);
  }
  return f;
}

GridFunction FuncOpts::build(int d) const {
  if (!input.empty()) return read_grid(input, d);
  if (kind == "delta") return delta_function(d, side);
  if (kind == "box") return box_indicator(d, side, width);
  if (kind == "random") return random_function(d, side, seed);
  if (kind == "indicator") return random_indicator(d, side, density, seed);
  auto f = GridFunction::zeros(d, side);
  std::fill(f.values.begin(), f.values.end(), 1.0);
  return f;
}

json grid_json(const GridFunction& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return json{{"dimension", f.dimension}, {"side", f.side},     {"sum", sum},
              {"l1", f.norm1()},          {"l2", f.norm2()},    {"sup", f.norm_p(INFINITY)}};
}

AverageMethod average_method(const std::string& m) { return m == "dft" ? AverageMethod::dft : AverageMethod::direct; }

SampleScheme sample_scheme(const std::string& s) {
  if (s == "full") return SampleScheme::full;
  if (s == "declared") return SampleScheme::declared;
  return SampleScheme::automatic;
}

std::vector<double> default_gammas(int k) { return {k == 2 ? 0.5 : wooley_gamma(k)}; }

CountMethod count_method(const std::string& m) {
  if (m == "brute") return CountMethod::brute;
  if (m == "mitm") return CountMethod::mitm;
  return CountMethod::series;
}

void multiplier_table(Output& o, const MultiplierGrid& g, const MultiplierGrid* exact = nullptr,
                      const MultiplierGrid* error = nullptr) {
  for (int i = 0; i < g.dimension; ++i) o.table.columns.push_back("m" + std::to_string(i + 1));
  o.table.columns.insert(o.table.columns.end(), {"re", "im"});
  if (exact) o.table.columns.insert(o.table.columns.end(), {"exact_re", "exact_im", "error_re", "error_im"});
  for (std::size_t i = 0; i < g.sample.size(); ++i) {
    std::vector<json> row;
    for (auto c : g.sample[i]) row.emplace_back(c);
    row.emplace_back(g.values[i].real());
    row.emplace_back(g.values[i].imag());
    if (exact) {
      row.emplace_back(exact->values[i].real());
      row.emplace_back(exact->values[i].imag());
      row.emplace_back(error->values[i].real());
      row.emplace_back(error->values[i].imag());
    }
    o.table.rows.push_back(std::move(row));
  }
  o.doc["modulus"] = g.sample.modulus;
  o.doc["scheme"] = g.sample.scheme;
  o.doc["seed"] = g.sample.seed;
  o.doc["size"] = g.sample.size();
  o.doc["sup_norm"] = g.sup_norm();
  o.default_format = "csv";
}

// ---------- commands ----------

using Action = std::function<Output()>;

struct CommandDef {
  const char* name;
  const char* about;
  std::function<Action(CLI::App*)> define;
};

template <class T>
std::shared_ptr<T> state() {
  return std::make_shared<T>();
}

const std::vector<CommandDef>& commands() {
  static const std::vector<CommandDef> defs = {
      {"count", "N(r): number of n in Z^d with sum |n_i|^k = lambda (brute, series or meet-in-the-middle)",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 0, upto = -1;
           std::string method = "series";
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value lambda = r^k");
         app->add_option("--upto", s->upto, "sweep every lambda from 0 to this value instead");
         app->add_option("--method", s->method, "counting method")->check(CLI::IsMember({"brute", "series", "mitm"}));
         return [s] {
           Output o;
           o.table.columns = {"lambda", "count"};
           const auto m = count_method(s->method);
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"method", s->method}};
           if (s->upto >= 0) {
             const auto counts = count_sweep(s->kd.k, s->kd.d, s->upto, m);
             for (std::size_t l = 0; l < counts.size(); ++l) {
               o.table.rows.push_back({static_cast<std::int64_t>(l), big(counts[l])});
             }
             o.default_format = "csv";
             return o;
           }
           const auto n = count_points({s->kd.k, s->kd.d, s->lambda}, m);
           o.doc["lambda"] = s->lambda;
           o.doc["count"] = big(n);
           o.table.rows.push_back({s->lambda, big(n)});
           o.text = to_string(n);
           o.default_format = "text";
           return o;
         };
       }},
      {"enumerate", "points of the arithmetic k-sphere {n : sum |n_i|^k = lambda} in lexicographic order",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 0;
           std::size_t max_points = 1'000'000;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value");
         app->add_option("--max-points", s->max_points, "refuse spheres with more points");
         return [s] {
           Output o;
           const auto pts = enumerate_points({s->kd.k, s->kd.d, s->lambda}, s->max_points);
           for (int i = 0; i < s->kd.d; ++i) o.table.columns.push_back("x" + std::to_string(i + 1));
           for (std::size_t i = 0; i < pts.size(); ++i) {
             std::vector<json> row(pts[i].begin(), pts[i].end());
             o.table.rows.push_back(std::move(row));
           }
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"lambda", s->lambda}, {"size", pts.size()}};
           o.default_format = "csv";
           return o;
         };
       }},
      {"series", "coefficients of (sum_n q^{|n|^k})^d: the counts N(r) as a generating function",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t cutoff = 100;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--cutoff", s->cutoff, "largest exponent kept");
         return [s] {
           Output o;
           const auto series = power_series(one_dim_series(s->kd.k, s->cutoff), s->kd.d);
           o.table.columns = {"m", "coefficient"};
           for (std::int64_t m = 0; m <= series.cutoff; ++m) o.table.rows.push_back({m, big(series[m])});
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"cutoff", s->cutoff}};
           o.default_format = "csv";
           return o;
         };
       }},
      {"weyl", "Weyl sum sum_{n<=N} e(t n^k + xi n), exact phases; --symmetric sums over |n| <= N",
       [](CLI::App* app) -> Action {
         struct S {
           std::int64_t N = 100, a = 0, q = 0, xi_num = 0, xi_den = 1;
           double t = 0.0, xi = 0.0;
           int k = 2;
           bool symmetric = false;
         };
         auto s = state<S>();
         app->add_option("--N", s->N, "length N");
         app->add_option("--t", s->t, "frequency t");
         app->add_option("--xi", s->xi, "linear frequency xi");
         app->add_option("--k", s->k, "degree k");
         app->add_flag("--symmetric", s->symmetric, "sum over |n| <= N with |n|^k");
         app->add_option("--a", s->a, "rational mode: t = a/q");
         app->add_option("--q", s->q, "rational mode denominator (0 disables)");
         app->add_option("--xi-num", s->xi_num, "rational mode: xi numerator");
         app->add_option("--xi-den", s->xi_den, "rational mode: xi denominator");
         return [s] {
           Output o;
           Complex z;
           o.doc = {{"N", s->N}, {"k", s->k}, {"symmetric", s->symmetric}};
           if (s->q > 0) {
             z = weyl_sum_rational(s->N, s->k, s->a, s->q, s->xi_num, s->xi_den, s->symmetric);
             o.doc["a"] = s->a;
             o.doc["q"] = s->q;
             o.doc["xi_num"] = s->xi_num;
             o.doc["xi_den"] = s->xi_den;
           } else {
             z = weyl_sum({s->N, s->t, s->xi, s->k}, s->symmetric);
             o.doc["t"] = s->t;
             o.doc["xi"] = s->xi;
           }
           o.doc["value"] = cplx(z);
           o.doc["abs"] = std::abs(z);
           o.table.columns = {"re", "im", "abs"};
           o.table.rows.push_back({z.real(), z.imag(), std::abs(z)});
           o.text = fmt_complex(z);
           o.default_format = "text";
           return o;
         };
       }},
      {"sup-probe", "Sup Hypothesis H(gamma): |S| against N (1/q + 1/N + q/N^k)^gamma near rationals a/q",
       [](CLI::App* app) -> Action {
         struct S {
           SupProbeOptions opts;
         };
         auto s = state<S>();
         app->add_option("--N", s->opts.length, "length N");
         app->add_option("--k", s->opts.degree, "degree k");
         app->add_option("--qmax", s->opts.q_max, "largest denominator");
         app->add_option("--xi-grid", s->opts.xi_grid, "xi = j / xi_grid");
         app->add_option("--gamma", s->opts.gammas, "exponents (default 1/2 for k=2, 1/(2(k-1)(k-2)) otherwise)")
             ->delimiter(',');
         return [s] {
           auto opts = s->opts;
           if (opts.gammas.empty()) opts.gammas = default_gammas(opts.degree);
           const auto rep = sup_hypothesis_probe(opts);
           Output o;
           o.doc = {{"N", opts.length},           {"k", opts.degree},
                    {"qmax", opts.q_max},         {"gammas", rep.gammas},
                    {"worst_ratio", rep.worst_ratio}, {"worst_log_ratio", rep.worst_log_ratio}};
           o.table.columns = {"a", "q", "xi_num", "xi_den", "abs"};
           for (std::size_t g = 0; g < rep.gammas.size(); ++g) {
             o.table.columns.push_back("ratio_" + std::to_string(g));
             o.table.columns.push_back("log_ratio_" + std::to_string(g));
           }
           for (const auto& r : rep.rows) {
             std::vector<json> row{r.a, r.q, r.xi_num, r.xi_den, r.abs_sum};
             for (std::size_t g = 0; g < rep.gammas.size(); ++g) {
               row.emplace_back(r.ratio[g]);
               row.emplace_back(r.log_ratio[g]);
             }
             o.table.rows.push_back(std::move(row));
           }
           return o;
         };
       }},
      {"sphere-sum", "a_r(theta) = sum over the sphere of e(n . theta), directly or as a DFT integral",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 0;
           std::vector<double> theta;
           std::string method = "direct";
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value");
         app->add_option("--theta", s->theta, "frequency vector (default 0)")->delimiter(',');
         app->add_option("--method", s->method, "direct or dft")->check(CLI::IsMember({"direct", "dft"}));
         return [s] {
           auto theta = s->theta;
           if (theta.empty()) theta.assign(s->kd.d, 0.0);
           const auto z = sphere_exponential_sum({s->kd.k, s->kd.d, s->lambda}, theta,
                                                 s->method == "dft" ? SphereSumMethod::dft_integral
                                                                    : SphereSumMethod::direct);
           Output o;
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"lambda", s->lambda}, {"theta", theta},
                    {"method", s->method}, {"value", cplx(z)}};
           o.table.columns = {"re", "im"};
           o.table.rows.push_back({z.real(), z.imag()});
           o.text = fmt_complex(z);
           o.default_format = "text";
           return o;
         };
       }},
      {"meanvalue", "MV(s): int |alpha_r(t,0)|^{2s} dt as an exact solution count (optional trapezoid estimate)",
       [](CLI::App* app) -> Action {
         struct S {
           int k = 2, s = 2;
           std::int64_t r = 5, nodes = 0;
           std::string range = "symmetric";
         };
         auto s = state<S>();
         app->add_option("--k", s->k, "degree k");
         app->add_option("--r", s->r, "radius r");
         app->add_option("--s", s->s, "moment s");
         app->add_option("--range", s->range, "symmetric |n| <= r or positive 1 <= n <= r")
             ->check(CLI::IsMember({"symmetric", "positive"}));
         app->add_option("--nodes", s->nodes, "also evaluate the trapezoid rule with this many nodes");
         return [s] {
           const auto range = s->range == "positive" ? SumRange::positive : SumRange::symmetric;
           const auto rep = mean_value_exact(s->k, s->r, s->s, range);
           Output o;
           o.doc = {{"k", s->k}, {"r", s->r}, {"s", s->s}, {"range", s->range},
                    {"exact", big(rep.exact_count)}, {"bound_ratio", rep.bound_ratio}};
           o.table.columns = {"k", "r", "s", "exact", "bound_ratio"};
           std::vector<json> row{s->k, s->r, s->s, big(rep.exact_count), rep.bound_ratio};
           if (s->nodes > 0) {
             const double quad = mean_value_quadrature(s->k, s->r, s->s, s->nodes, range);
             o.doc["nodes"] = s->nodes;
             o.doc["quadrature"] = quad;
             o.table.columns.push_back("quadrature");
             row.emplace_back(quad);
           }
           o.table.rows.push_back(std::move(row));
           o.text = to_string(rep.exact_count);
           o.default_format = "text";
           return o;
         };
       }},
      {"vinogradov", "Vinogradov mean value J_{s,k}(N) by exact counting, with the bound N^s + N^{2s-k(k+1)/2}",
       [](CLI::App* app) -> Action {
         struct S {
           int s = 2, k = 2;
           std::int64_t N = 3;
         };
         auto s = state<S>();
         app->add_option("--s", s->s, "number of variables per side");
         app->add_option("--k", s->k, "degree k");
         app->add_option("--N", s->N, "range [1,N]");
         return [s] {
           const auto J = vinogradov_J(s->s, s->k, s->N);
           const double bound = vinogradov_bound(s->s, s->k, s->N);
           Output o;
           o.doc = {{"s", s->s}, {"k", s->k}, {"N", s->N}, {"J", big(J)}, {"bound", bound}};
           o.table.columns = {"s", "k", "N", "J", "bound"};
           o.table.rows.push_back({s->s, s->k, s->N, big(J), bound});
           o.text = to_string(J);
           o.default_format = "text";
           return o;
         };
       }},
      {"bridge", "mean value MV(s) against r^{k(k-1)/2} J_{s,k}(r), the bridge to Vinogradov's mean value",
       [](CLI::App* app) -> Action {
         struct S {
           int k = 2, s = 2;
           std::int64_t r = 10;
         };
         auto s = state<S>();
         app->add_option("--k", s->k, "degree k");
         app->add_option("--r", s->r, "radius r");
         app->add_option("--s", s->s, "moment s");
         return [s] {
           const auto rep = vaughan_bridge_check(s->k, s->r, s->s);
           Output o;
           o.doc = {{"k", s->k},
                    {"r", s->r},
                    {"s", s->s},
                    {"mean_value", big(rep.mean_value)},
                    {"J", big(rep.j_value)},
                    {"ratio", rep.ratio},
                    {"symmetric_mean_value", big(rep.symmetric_mean_value)},
                    {"symmetric_ratio", rep.symmetric_ratio}};
           o.table.columns = {"k", "r", "s", "mean_value", "J", "ratio", "symmetric_mean_value", "symmetric_ratio"};
           o.table.rows.push_back({s->k, s->r, s->s, big(rep.mean_value), big(rep.j_value), rep.ratio,
                                   big(rep.symmetric_mean_value), rep.symmetric_ratio});
           return o;
         };
       }},
      {"gauss", "normalized Gauss sum G(a,q;m) = q^{-d} sum_{b mod q} e((a|b|^k + b.m)/q), d = length of m",
       [](CLI::App* app) -> Action {
         struct S {
           std::int64_t a = 1, q = 3;
           int k = 2;
           std::vector<std::int64_t> m{0};
         };
         auto s = state<S>();
         app->add_option("--a", s->a, "numerator a, gcd(a,q) = 1");
         app->add_option("--q", s->q, "modulus q");
         app->add_option("--k", s->k, "degree k");
         app->add_option("--m", s->m, "linear frequency vector")->delimiter(',');
         return [s] {
           const auto z = gauss_sum_dd(s->a, s->q, s->k, s->m);
           Output o;
           o.doc = {{"a", s->a}, {"q", s->q}, {"k", s->k}, {"m", s->m}, {"value", cplx(z)}, {"abs", std::abs(z)}};
           o.table.columns = {"re", "im", "abs"};
           o.table.rows.push_back({z.real(), z.imag(), std::abs(z)});
           o.text = fmt_complex(z);
           o.default_format = "text";
           return o;
         };
       }},
      {"steckin-fit", "Stečkin's estimate: slope of log max|G(a,q;m)| against log q, expected -d/k",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t qmax = 500;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 1);
         app->add_option("--qmax", s->qmax, "largest modulus (>= 16)");
         return [s] {
           const auto rep = steckin_fit(s->kd.k, s->kd.d, s->qmax);
           Output o;
           o.doc = {{"k", s->kd.k},
                    {"d", s->kd.d},
                    {"qmax", s->qmax},
                    {"slope", rep.slope},
                    {"intercept", rep.intercept},
                    {"target", -static_cast<double>(s->kd.d) / s->kd.k},
                    {"constant", rep.constant},
                    {"worst_q", rep.worst_q}};
           o.table.columns = {"q", "max_abs"};
           for (std::size_t q = 1; q < rep.max_abs.size(); ++q) {
             o.table.rows.push_back({static_cast<std::int64_t>(q), rep.max_abs[q]});
           }
           return o;
         };
       }},
      {"singular-series", "truncated singular series sum_{q<=Q} sum_a e(-a lambda/q) G(a,q;0)^d with a tail bound",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 100, Q = 32;
           double C = 0.0;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         app->add_option("--lambda", s->lambda, "power value");
         app->add_option("--Q", s->Q, "truncation");
         app->add_option("--C", s->C, "Stečkin constant for the tail (0 fits it)");
         return [s] {
           const auto rep = s->C > 0.0 ? singular_series_partial(s->kd.k, s->kd.d, s->lambda, s->Q, s->C)
                                       : singular_series_partial(s->kd.k, s->kd.d, s->lambda, s->Q);
           Output o;
           o.doc = {{"k", s->kd.k},          {"d", s->kd.d},
                    {"lambda", s->lambda},   {"Q", s->Q},
                    {"value", cplx(rep.value)}, {"tail_bound", rep.tail_bound},
                    {"steckin_constant", rep.steckin_constant}};
           o.table.columns = {"q", "re", "im"};
           for (std::size_t q = 1; q < rep.partial.size(); ++q) {
             o.table.rows.push_back({static_cast<std::int64_t>(q), rep.partial[q].real(), rep.partial[q].imag()});
           }
           return o;
         };
       }},
      {"sigma-ft", "Fourier transform of the normalized Gelfand-Leray measure on {sum |x_i|^k = r^k}",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           double radius = 1.0;
           int resolution = 256;
           std::vector<double> xi;
           std::string mode = "automatic";
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--radius", s->radius, "radius r");
         app->add_option("--resolution", s->resolution, "Gauss-Legendre nodes per level");
         app->add_option("--xi", s->xi, "frequency vector (default 0)")->delimiter(',');
         app->add_option("--mode", s->mode, "automatic or nested")->check(CLI::IsMember({"automatic", "nested"}));
         return [s] {
           auto xi = s->xi;
           if (xi.empty()) xi.assign(s->kd.d, 0.0);
           const SurfaceQuadrature quad({s->kd.k, s->kd.d, s->radius, s->resolution});
           const auto v = sigma_fourier(quad, xi, s->mode == "nested" ? Evaluation::nested : Evaluation::automatic);
           Output o;
           o.doc = {{"k", s->kd.k},       {"d", s->kd.d},
                    {"radius", s->radius}, {"resolution", s->resolution},
                    {"xi", xi},           {"value", v.real()},
                    {"trusted", sigma_trusted(quad, xi)}};
           o.table.columns = {"value", "trusted"};
           o.table.rows.push_back({v.real(), sigma_trusted(quad, xi)});
           o.text = fmt_double(v.real());
           o.default_format = "text";
           return o;
         };
       }},
      {"bnw-fit", "surface-measure decay |sigma_hat(R xi)| ~ R^{(1-d)/k}: slope of local maxima on the trusted range",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           double radius = 1.0, Rmin = 2.0, Rmax = 1e9, step = 0.02;
           int resolution = 256;
           std::vector<double> direction;
           std::string mode = "automatic";
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--radius", s->radius, "radius r");
         app->add_option("--resolution", s->resolution, "Gauss-Legendre nodes per level");
         app->add_option("--direction", s->direction, "direction xi0 (default e_1)")->delimiter(',');
         app->add_option("--Rmin", s->Rmin, "smallest |xi|");
         app->add_option("--Rmax", s->Rmax, "largest |xi| (clipped to the trusted range)");
         app->add_option("--step", s->step, "sampling step in R");
         app->add_option("--mode", s->mode, "automatic or nested")->check(CLI::IsMember({"automatic", "nested"}));
         return [s] {
           auto dir = s->direction;
           if (dir.empty()) {
             dir.assign(s->kd.d, 0.0);
             dir[0] = 1.0;
           }
           const SurfaceQuadrature quad({s->kd.k, s->kd.d, s->radius, s->resolution});
           const auto fit = bnw_decay_fit(quad, dir, s->Rmin, s->Rmax, s->step,
                                          s->mode == "nested" ? Evaluation::nested : Evaluation::automatic);
           Output o;
           o.doc = {{"k", s->kd.k},          {"d", s->kd.d},           {"direction", dir},
                    {"resolution", s->resolution}, {"slope", fit.slope}, {"intercept", fit.intercept},
                    {"theory", fit.theory},  {"maxima", fit.maxima}};
           o.table.columns = {"R", "value"};
           for (const auto& t : fit.trace) o.table.rows.push_back({t.R, t.value});
           return o;
         };
       }},
      {"exact-mult", "multiplier a_r(theta)/(vol r^{d-k}) of the k-spherical average on theta = m/M",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 9, M = 16;
           std::string scheme = "automatic";
           std::size_t random_count = 512;
           std::uint64_t seed = 1;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value");
         app->add_option("--M", s->M, "frequency grid modulus");
         app->add_option("--scheme", s->scheme, "frequency sample")
             ->check(CLI::IsMember({"automatic", "full", "declared"}));
         app->add_option("--random-count", s->random_count, "random points in the declared sample");
         app->add_option("--seed", s->seed, "sample seed");
         return [s] {
           const auto sample =
               make_frequency_sample(s->kd.d, s->M, sample_scheme(s->scheme), s->random_count, s->seed);
           const SphereSpec spec{s->kd.k, s->kd.d, s->lambda};
           const auto g = exact_multiplier(spec, sample);
           Output o;
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"lambda", s->lambda},
                    {"normalization", multiplier_normalization(spec)}};
           multiplier_table(o, g);
           return o;
         };
       }},
      {"main-term", "circle-method main term sum_{q<=Q} sum_a e(-a lambda/q) G(a,q;m) Psi(q theta - m) sigma_hat",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 9, M = 16, Q = 0;
           int resolution = 0;
           std::string scheme = "automatic";
           std::size_t random_count = 512;
           std::uint64_t seed = 1;
           bool with_error = false;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value");
         app->add_option("--M", s->M, "frequency grid modulus");
         app->add_option("--Q", s->Q, "major arc cutoff (0 = floor(r^(1/2)))");
         app->add_option("--resolution", s->resolution, "surface quadrature resolution (0 = automatic)");
         app->add_option("--scheme", s->scheme, "frequency sample")
             ->check(CLI::IsMember({"automatic", "full", "declared"}));
         app->add_option("--random-count", s->random_count, "random points in the declared sample");
         app->add_option("--seed", s->seed, "sample seed");
         app->add_flag("--with-error", s->with_error, "also emit the exact multiplier and the error term");
         return [s] {
           const auto sample =
               make_frequency_sample(s->kd.d, s->M, sample_scheme(s->scheme), s->random_count, s->seed);
           const SphereSpec spec{s->kd.k, s->kd.d, s->lambda};
           const auto Q = s->Q > 0 ? s->Q : default_Q(spec);
           Output o;
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"lambda", s->lambda}, {"Q", Q},
                    {"normalization", multiplier_normalization(spec)}};
           if (s->with_error) {
             const auto rep = error_multiplier(spec, sample, Q);
             multiplier_table(o, rep.main, &rep.exact, &rep.error);
             o.doc["error_sup"] = rep.sup;
             o.doc["error_argsup"] = rep.argsup;
           } else {
             multiplier_table(o, main_term_multiplier(spec, sample, Q, s->resolution));
           }
           return o;
         };
       }},
      {"error-decay", "decay of the error multiplier sup|E_r| ~ r^{-kappa} with kappa compared to min{d gamma - k, d/k - (k+2)}",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::vector<std::int64_t> lambdas;
           std::int64_t lambda_min = 16, lambda_max = 100, M = 64, Q = 0;
           std::string scheme = "automatic";
           std::size_t random_count = 512;
           std::uint64_t seed = 1;
           std::vector<double> gammas;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         app->add_option("--lambdas", s->lambdas, "explicit power values")->delimiter(',');
         app->add_option("--lambda-min", s->lambda_min, "every integer power value from here");
         app->add_option("--lambda-max", s->lambda_max, "up to here");
         app->add_option("--M", s->M, "frequency grid modulus");
         app->add_option("--Q", s->Q, "major arc cutoff (0 = floor(r^(1/2)) per radius)");
         app->add_option("--scheme", s->scheme, "frequency sample")
             ->check(CLI::IsMember({"automatic", "full", "declared"}));
         app->add_option("--random-count", s->random_count, "random points in the declared sample");
         app->add_option("--seed", s->seed, "sample seed");
         app->add_option("--gamma", s->gammas, "Sup Hypothesis exponents for the theoretical kappa")->delimiter(',');
         return [s] {
           const auto lams = resolve_lambdas(s->lambdas, s->lambda_min, s->lambda_max);
           const auto gammas = s->gammas.empty() ? default_gammas(s->kd.k) : s->gammas;
           const auto sample =
               make_frequency_sample(s->kd.d, s->M, sample_scheme(s->scheme), s->random_count, s->seed);
           const auto rep = decay_fit(s->kd.k, s->kd.d, lams, sample, s->Q, gammas);
           Output o;
           o.doc = {{"k", s->kd.k},           {"d", s->kd.d},
                    {"modulus", s->M},        {"scheme", sample.scheme},
                    {"seed", sample.seed},    {"sample_size", sample.size()},
                    {"slope", rep.slope},     {"kappa_emp", rep.kappa_emp},
                    {"gammas", rep.gammas},   {"kappa_theory", rep.kappa_theory}};
           o.table.columns = {"lambda", "r", "Q", "sup_error"};
           for (const auto& r : rep.rows) o.table.rows.push_back({r.power_value, r.r, r.Q, r.sup_error});
           return o;
         };
       }},
      {"arc-split", "major/minor arc split of a_r(theta) = int e(-lambda t) prod alpha_r(t,theta_i) dt",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 9, Qmajor = 0;
           double nu = 1.0;
           std::vector<double> theta;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value");
         app->add_option("--theta", s->theta, "frequency vector (default 0)")->delimiter(',');
         app->add_option("--Qmajor", s->Qmajor, "largest major arc denominator (0 = floor(r^(1/2)))");
         app->add_option("--nu", s->nu, "major arc width exponent");
         return [s] {
           auto theta = s->theta;
           if (theta.empty()) theta.assign(s->kd.d, 0.0);
           const SphereSpec spec{s->kd.k, s->kd.d, s->lambda};
           DissectionRule rule;
           if (s->Qmajor > 0) rule.Q_major = s->Qmajor;
           rule.nu = s->nu;
           const auto arcs = rule.at(spec);
           const auto split = arc_split(spec, arcs, theta);
           const auto exact = sphere_exponential_sum(spec, theta, SphereSumMethod::direct);
           Output o;
           o.doc = {{"k", s->kd.k},           {"d", s->kd.d},         {"lambda", s->lambda},
                    {"theta", theta},         {"Q_major", arcs.Q_major}, {"nu", arcs.nu},
                    {"major", cplx(split.major)}, {"minor", cplx(split.minor)}, {"exact", cplx(exact)},
                    {"nodes", split.nodes},   {"major_nodes", split.major_nodes}};
           o.table.columns = {"major_re", "major_im", "minor_re", "minor_im", "exact_re", "exact_im"};
           o.table.rows.push_back({split.major.real(), split.major.imag(), split.minor.real(), split.minor.imag(),
                                   exact.real(), exact.imag()});
           return o;
         };
       }},
      {"minor-trace", "minor arc contribution against r with the Hölder/mean value bound, slope vs -(d-2s) gamma",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::vector<std::int64_t> lambdas;
           std::int64_t lambda_min = 16, lambda_max = 64, Qmajor = 0;
           double nu = 1.0;
           int s = 2, theta_count = 8;
           std::uint64_t seed = 1;
           std::vector<double> gammas;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         app->add_option("--lambdas", s->lambdas, "explicit power values")->delimiter(',');
         app->add_option("--lambda-min", s->lambda_min, "every integer power value from here");
         app->add_option("--lambda-max", s->lambda_max, "up to here");
         app->add_option("--Qmajor", s->Qmajor, "largest major arc denominator (0 = floor(r^(1/2)))");
         app->add_option("--nu", s->nu, "major arc width exponent");
         app->add_option("--s", s->s, "mean value moment s");
         app->add_option("--theta-count", s->theta_count, "random frequencies per radius");
         app->add_option("--seed", s->seed, "frequency seed");
         app->add_option("--gamma", s->gammas, "Sup Hypothesis exponents")->delimiter(',');
         return [s] {
           const auto lams = resolve_lambdas(s->lambdas, s->lambda_min, s->lambda_max);
           const auto gammas = s->gammas.empty() ? default_gammas(s->kd.k) : s->gammas;
           if (s->theta_count < 1) throw DomainError("theta-count must be positive");
           std::mt19937_64 rng(s->seed);
           std::uniform_real_distribution<double> u(0.0, 1.0);
           std::vector<std::vector<double>> thetas(s->theta_count, std::vector<double>(s->kd.d));
           for (auto& th : thetas) {
             for (double& v : th) v = u(rng);
           }
           DissectionRule rule;
           if (s->Qmajor > 0) rule.Q_major = s->Qmajor;
           rule.nu = s->nu;
           const auto tr = minor_arc_l2_trace(s->kd.k, s->kd.d, lams, rule, s->s, thetas, gammas);
           Output o;
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d},   {"s", tr.s},           {"seed", s->seed},
                    {"slope", tr.slope}, {"gammas", tr.gammas}, {"theory", tr.theory}};
           o.table.columns = {"lambda", "r", "Q_major", "sup_minor", "holder_ratio", "holder_applicable"};
           for (const auto& r : tr.rows) {
             o.table.rows.push_back(
                 {r.power_value, r.r, r.Q_major, r.sup_minor, r.holder_ratio, r.holder_applicable});
           }
           return o;
         };
       }},
      {"average", "k-spherical average A_r f(x) = N(r)^{-1} sum_{y on the sphere} f(x-y) on the torus (Z/M)^d",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::int64_t lambda = 1;
           FuncOpts f;
           std::string method = "direct";
           bool lattice = false;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         app->add_option("--lambda", s->lambda, "power value");
         add_function(app, s->f, "delta", 16);
         app->add_option("--method", s->method, "direct or dft")->check(CLI::IsMember({"direct", "dft"}));
         app->add_flag("--lattice", s->lattice, "reject parameters where wraparound would alias");
         return [s] {
           const auto f = s->f.build(s->kd.d);
           auto g = spherical_average(f, {s->kd.k, s->kd.d, s->lambda}, {average_method(s->method), s->lattice});
           Output o;
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d},       {"lambda", s->lambda},  {"method", s->method},
                    {"seed", s->f.seed}, {"input", grid_json(f)}, {"output", grid_json(g)}};
           o.table.columns = {"which", "sum", "l1", "l2", "sup"};
           for (const char* w : {"input", "output"}) {
             const auto& j = o.doc[w];
             o.table.rows.push_back({w, j["sum"], j["l1"], j["l2"], j["sup"]});
           }
           o.grid = std::move(g);
           return o;
         };
       }},
      {"maximal", "maximal function sup_{r in R} |A_r f| over a radius sequence on the torus",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           SeqOpts seq;
           FuncOpts f;
           std::string method = "direct";
           bool lattice = false;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 3);
         add_sequence(app, s->seq, "lacunary", 16, "--lambda-max");
         add_function(app, s->f, "delta", 16);
         app->add_option("--method", s->method, "direct or dft")->check(CLI::IsMember({"direct", "dft"}));
         app->add_flag("--lattice", s->lattice, "reject parameters where wraparound would alias");
         return [s] {
           const auto f = s->f.build(s->kd.d);
           const auto seq = s->seq.build(s->kd.k, s->kd.d);
           auto g = maximal_function(f, seq, {average_method(s->method), s->lattice});
           Output o;
           o.doc = {{"k", s->kd.k},         {"d", s->kd.d},          {"sequence", sequence_json(seq)},
                    {"members", seq.members}, {"method", s->method},  {"seed", s->f.seed},
                    {"input", grid_json(f)},  {"output", grid_json(g)}};
           o.table.columns = {"which", "sum", "l1", "l2", "sup"};
           for (const char* w : {"input", "output"}) {
             const auto& j = o.doc[w];
             o.table.rows.push_back({w, j["sum"], j["l1"], j["l2"], j["sup"]});
           }
           o.grid = std::move(g);
           return o;
         };
       }},
      {"delta-test", "endpoint test ||sup_{lambda<=Lambda} A_r delta||_p^p = sum N^{1-p}: growth in Lambda per p",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           std::vector<double> p{1.4, 5.0 / 3.0, 2.0};
           std::vector<std::int64_t> lambdas;
           std::int64_t lambda_max = 10000, start = 100;
           int points = 12;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         app->add_option("--p", s->p, "exponents p")->delimiter(',');
         app->add_option("--lambdas", s->lambdas, "explicit increasing Lambda list")->delimiter(',');
         app->add_option("--lambda-max", s->lambda_max, "largest Lambda of the geometric grid");
         app->add_option("--start", s->start, "smallest Lambda of the geometric grid");
         app->add_option("--points", s->points, "grid points");
         return [s] {
           const auto lams =
               s->lambdas.empty() ? default_density_grid(s->lambda_max, s->start, s->points) : s->lambdas;
           const auto rep = delta_endpoint_test(s->kd.k, s->kd.d, s->p, lams);
           Output o;
           o.doc = {{"k", s->kd.k}, {"d", s->kd.d}, {"sup_value", rep.sup_value}, {"series", json::array()}};
           o.table.columns = {"p", "lambda_max", "norm_pp", "slope"};
           for (const auto& ser : rep.series) {
             json rows = json::array();
             for (const auto& r : ser.rows) {
               rows.push_back({{"lambda_max", r.lambda_max}, {"norm_pp", r.norm_pp}});
               o.table.rows.push_back({ser.p, r.lambda_max, r.norm_pp, ser.slope});
             }
             o.doc["series"].push_back(
                 {{"p", ser.p}, {"slope", ser.slope}, {"cauchy_defect", ser.cauchy_defect}, {"rows", rows}});
           }
           return o;
         };
       }},
      {"density-fit", "density parameter: slope of log #{r in R : r <= Lambda} against log Lambda",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           SeqOpts seq;
           std::int64_t start = 16;
           int points = 16;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         add_sequence(app, s->seq, "full", 1'000'000, "--Lmax");
         app->add_option("--grid-start", s->start, "smallest power value of the geometric grid");
         app->add_option("--grid-points", s->points, "grid points");
         return [s] {
           const auto seq = s->seq.build(s->kd.k, s->kd.d);
           const auto grid = default_density_grid(s->seq.cutoff, s->start, s->points);
           const auto fit = density_parameter_fit(seq, grid);
           Output o;
           o.doc = {{"k", s->kd.k},     {"d", s->kd.d},           {"sequence", sequence_json(seq)},
                    {"Lmax", s->seq.cutoff}, {"slope", fit.delta}, {"intercept", fit.intercept}};
           o.table.columns = {"lambda", "r", "count"};
           for (std::size_t i = 0; i < fit.grid.size(); ++i) {
             o.table.rows.push_back({fit.grid[i], std::pow(static_cast<double>(fit.grid[i]), 1.0 / s->kd.k),
                                     static_cast<std::int64_t>(fit.counts[i])});
           }
           return o;
         };
       }},
      {"union-check", "l^1 union bound ||sup_{r<=Lambda0} A_r f||_1 <= #{members <= Lambda0} ||f||_1",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           SeqOpts seq;
           FuncOpts f;
           std::int64_t lambda0 = 64;
           std::string method = "dft";
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         add_sequence(app, s->seq, "lacunary", 64, "--lambda-max");
         add_function(app, s->f, "box", 26);
         app->add_option("--lambda0", s->lambda0, "narrow range bound");
         app->add_option("--method", s->method, "direct or dft")->check(CLI::IsMember({"direct", "dft"}));
         return [s] {
           const auto f = s->f.build(s->kd.d);
           const auto seq = s->seq.build(s->kd.k, s->kd.d);
           const auto rep = narrow_union_bound_check(f, seq, s->lambda0, {average_method(s->method), false});
           Output o;
           o.doc = {{"k", s->kd.k},           {"d", s->kd.d},       {"sequence", sequence_json(seq)},
                    {"lambda0", s->lambda0},  {"seed", s->f.seed},  {"sup_norm1", rep.sup_norm1},
                    {"bound", rep.bound},     {"ratio", rep.ratio}, {"members", rep.members},
                    {"indicator", rep.indicator}};
           o.table.columns = {"sup_norm1", "bound", "ratio", "members", "indicator"};
           o.table.rows.push_back({rep.sup_norm1, rep.bound, rep.ratio, rep.members, rep.indicator});
           return o;
         };
       }},
      {"rwt-probe", "restricted weak type: alpha^p |{M 1_F > alpha}| / |F| over random finite F in Z^d",
       [](CLI::App* app) -> Action {
         struct S {
           KD kd;
           SeqOpts seq;
           double p = 5.0 / 3.0, density = 0.25;
           int max_exponent = 10;
           std::uint64_t seed = 1;
         };
         auto s = state<S>();
         add_kd(app, s->kd, 2, 5);
         add_sequence(app, s->seq, "lacunary", 64, "--lambda-max");
         app->add_option("--p", s->p, "exponent p");
         app->add_option("--max-exponent", s->max_exponent, "set sizes 2^j for j = 0..max-exponent");
         app->add_option("--density", s->density, "density of F in its bounding box");
         app->add_option("--seed", s->seed, "base seed; set j uses seed + j");
         return [s] {
           if (s->max_exponent < 0 || s->max_exponent > 20) throw DomainError("max-exponent must lie in 0..20");
           const auto seq = s->seq.build(s->kd.k, s->kd.d);
           std::vector<LatticeSet> sets;
           for (int j = 0; j <= s->max_exponent; ++j) {
             sets.push_back(random_lattice_set(s->kd.d, std::size_t{1} << j, s->density, s->seed + j));
           }
           const auto alts = default_altitudes();
           const auto rep = restricted_weak_type_probe(seq, s->p, sets, alts);
           Output o;
           o.doc = {{"k", s->kd.k},     {"d", s->kd.d},           {"sequence", sequence_json(seq)},
                    {"p", rep.p},       {"seed", s->seed},        {"density", s->density},
                    {"worst", rep.worst}, {"spread", rep.spread}};
           o.table.columns = {"set_size", "constant", "best_altitude", "limit_constant"};
           for (const auto& r : rep.rows) {
             o.table.rows.push_back({r.set_size, r.constant, r.best_altitude, r.limit_constant});
           }
           return o;
         };
       }},
  };
  return defs;
}

const CommandDef* find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (name == c.name) return &c;
  }
  return nullptr;
}

struct Globals {
  std::string format = "auto";
  std::string out;
  int jobs = 0;
  std::string config;
};

void add_globals(CLI::App* app, Globals& g) {
  app->add_option("--format", g.format, "auto, text, csv, json or both")
      ->check(CLI::IsMember({"auto", "text", "csv", "json", "both"}));
  app->add_option("--out", g.out, "write <out>.json / <out>.csv / <out>.manifest.json");
  app->add_option("--jobs", g.jobs, "OpenMP threads (0 = runtime default)");
  app->add_option("--config", g.config, "flat key=value file; command-line flags take precedence");
}

std::unique_ptr<CLI::App> make_app(const CommandDef& def, Globals& g, Action& action) {
  auto app = std::make_unique<CLI::App>(def.about, std::string("ksphere ") + def.name);
  app->option_defaults()->always_capture_default();
  action = def.define(app.get());
  add_globals(app.get(), g);
  return app;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << data;
  f.close();
  if (!f) throw IoError("failed writing " + path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json resolved_config(const CLI::App& app) {
  json cfg = json::object();
  for (const auto* opt : app.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
    const auto& name = opt->get_lnames()[0];
    if (name == "config" || name == "out") continue;
    std::string value;
    if (opt->count() > 0) {
      for (std::size_t i = 0; i < opt->results().size(); ++i) value += (i ? "," : "") + opt->results()[i];
    } else {
      value = opt->get_default_str();
    }
    cfg[name] = value;
  }
  return cfg;
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

int execute(const CommandDef& def, std::vector<std::string> rest, std::ostream& out, std::ostream& err) {
  Globals g;
  Action action;
  auto app = make_app(def, g, action);
  std::reverse(rest.begin(), rest.end());
  try {
    app->parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << "ksphere " << def.name << ": " << e.what() << "\n";
    return Exit::invalid;
  }
  if (g.jobs < 0) {
    err << "ksphere " << def.name << ": --jobs must be >= 0\n";
    return Exit::invalid;
  }
  if (g.jobs > 0) omp_set_num_threads(g.jobs);

  const auto t0 = std::chrono::steady_clock::now();
  Output o = action();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!o.table.rows.empty() && !o.doc.contains("rows")) {
    json rows = json::array();
    for (const auto& row : o.table.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[o.table.columns[i]] = row[i];
      rows.push_back(std::move(obj));
    }
    o.doc["rows"] = std::move(rows);
  }
  std::string fmt = g.format == "auto" ? o.default_format : g.format;
  if (fmt == "text" && !o.text) fmt = "json";
  const auto json_text = to_json_text(o.doc);
  const auto csv_text = o.table.csv();
  if (fmt == "text") out << *o.text << "\n";
  if (fmt == "json" || fmt == "both") out << json_text;
  if (fmt == "csv" || fmt == "both") out << csv_text;

  if (!g.out.empty()) {
    std::vector<std::string> files;
    if (g.format != "csv") {
      write_file(g.out + ".json", json_text);
      files.push_back(g.out + ".json");
    }
    if (g.format != "json") {
      write_file(g.out + ".csv", csv_text);
      files.push_back(g.out + ".csv");
    }
    if (o.grid) {
      const auto& grid = *o.grid;
      std::string raw(reinterpret_cast<const char*>(grid.values.data()), grid.values.size() * sizeof(double));
      write_file(g.out + ".f64", raw);
      write_file(g.out + ".f64.json",
                 to_json_text(json{{"dimension", grid.dimension},
                                   {"side", grid.side},
                                   {"dtype", "float64"},
                                   {"order", "row-major"}}));
      files.push_back(g.out + ".f64");
    }
    const json manifest = {{"tool", "ksphere"},
                           {"version", tool_version},
                           {"command", def.name},
                           {"config", resolved_config(*app)},
                           {"outputs", files},
                           {"wall_time_seconds", wall},
                           {"timestamp", utc_timestamp()}};
    write_file(g.out + ".manifest.json", to_json_text(manifest));
  }
  return Exit::ok;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& c : commands()) names.emplace_back(c.name);
  return names;
}

std::string help_text() {
  std::ostringstream s;
  s << "usage: ksphere <command> [options]\n"
       "       ksphere --help <command>\n\n"
       "Lattice points, exponential sums and maximal functions for arithmetic k-spheres.\n\ncommands:\n";
  std::size_t width = 0;
  for (const auto& c : commands()) width = std::max(width, std::string(c.name).size());
  for (const auto& c : commands()) {
    s << "  " << c.name << std::string(width + 2 - std::string(c.name).size(), ' ') << c.about << "\n";
  }
  s << "\nglobal options (every command):\n"
       "  --format auto|text|csv|json|both   --out PREFIX   --jobs N   --config FILE\n"
       "\nexit codes: 0 ok, 2 invalid input, 3 work bound exceeded (KSPHERE_WORK_BOUND), 4 I/O failure\n";
  return s.str();
}

std::string suggest(const std::string& name) {
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const auto& c : commands()) {
    if (name.size() >= 3 && std::string_view(c.name).starts_with(name)) return c.name;
  }
  for (const auto& c : commands()) {
    const auto d = edit_distance(name, c.name);
    if (d < best_d) {
      best_d = d;
      best = c.name;
    }
  }
  return best_d <= std::max<std::size_t>(2, name.size() / 3) ? best : std::string();
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return v.substr(b, v.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) throw DomainError(path + ":" + std::to_string(lineno) + ": empty key");
    kv.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.empty()) {
      out << help_text();
      return Exit::ok;
    }
    if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
      if (args.size() == 1) {
        out << help_text();
        return Exit::ok;
      }
      const auto* def = find_command(args[1]);
      if (!def) {
        const auto s = suggest(args[1]);
        err << "ksphere: unknown command '" << args[1] << "'" << (s.empty() ? "" : "; did you mean '" + s + "'?")
            << "\n";
        return Exit::invalid;
      }
      Globals g;
      Action action;
      out << make_app(*def, g, action)->help();
      return Exit::ok;
    }
    if (args[0] == "--version") {
      out << "ksphere " << tool_version << "\n";
      return Exit::ok;
    }

    std::vector<std::pair<std::string, std::string>> cfg;
    if (const auto path = config_path(args)) cfg = read_config(*path);
    std::string name = args[0];
    std::vector<std::string> rest(args.begin() + 1, args.end());
    if (name.rfind("-", 0) == 0) {
      const auto it = std::find_if(cfg.begin(), cfg.end(), [](const auto& kv) { return kv.first == "command"; });
      if (it == cfg.end()) {
        err << "ksphere: expected a command before '" << name << "'\n";
        return Exit::invalid;
      }
      name = it->second;
      rest = args;
    }
    const auto* def = find_command(name);
    if (!def) {
      const auto s = suggest(name);
      err << "ksphere: unknown command '" << name << "'" << (s.empty() ? "" : "; did you mean '" + s + "'?")
          << "\n";
      return Exit::invalid;
    }
    std::vector<std::string> merged;
    for (const auto& [key, value] : cfg) {
      if (key == "command" || key == "config" || has_flag(rest, key)) continue;
      merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), rest.begin(), rest.end());
    return execute(*def, merged, out, err);
  } catch (const WorkBoundExceeded& e) {
    err << "ksphere: work bound exceeded: " << e.what() << "\n";
    return Exit::too_much_work;
  } catch (const IoError& e) {
    err << "ksphere: I/O failure: " << e.what() << "\n";
    return Exit::io_failure;
  } catch (const std::invalid_argument& e) {
    err << "ksphere: invalid input: " << e.what() << "\n";
    return Exit::invalid;
  } catch (const std::exception& e) {
    err << "ksphere: error: " << e.what() << "\n";
    return Exit::internal;
  }
}

}  // namespace ksphere::cli
