// diffsum: command-line front end.
#include "output.hpp"

#include "diffsum/certificate.hpp"
#include "diffsum/config.hpp"
#include "diffsum/errors.hpp"
#include "diffsum/inequalities.hpp"
#include "diffsum/oracles.hpp"
#include "diffsum/rational.hpp"
#include "diffsum/transforms.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

using namespace diffsum;
using diffsum::cli::Record;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

struct Globals {
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string config_path;
  RunConfig config;
};

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string members(const AnySet& s) {
  return std::visit([](const auto& x) { return join_members(x); }, s);
}

CyclicSet read_cyclic(const std::string& path) {
  AnySet s = read_set_file(path);
  if (auto* c = std::get_if<CyclicSet>(&s)) return std::move(*c);
  throw FormatError("'" + path + "': expected a cyclic set (header 'zq <q>')");
}

IntegerSet read_integer(const std::string& path) {
  AnySet s = read_set_file(path);
  if (auto* c = std::get_if<IntegerSet>(&s)) return std::move(*c);
  throw FormatError("'" + path + "': expected an integer set (header 'int')");
}

void maybe_write(const std::string& path, const AnySet& s) {
  if (!path.empty()) write_set_file(path, s);
}

CLI::Validator rational_check() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          parse_rational(s);
          return {};
        } catch (const Error& e) {
          return e.what();
        }
      },
      "NUM/DEN");
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("no colon");
    const auto lo = std::stoull(text.substr(0, colon));
    const auto hi = std::stoull(text.substr(colon + 1));
    if (hi < lo) throw std::invalid_argument("empty");
    return {lo, hi};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--q-range", "expected LO:HI with LO <= HI, got '" + text + "'");
  }
}

Record oracle_record(const OracleResult& r) {
  Record rec;
  rec["quantity"] = std::string(quantity_name(r.quantity));
  rec["k"] = r.k;
  rec["q"] = r.q;
  rec["value"] = r.value;
  rec["exhaustive"] = r.exhaustive;
  rec["diameter_bound"] = r.diameter_bound ? Record(*r.diameter_bound) : Record(nullptr);
  rec["witness"] = members(r.witness);
  return rec;
}

Record stage1_record(const Stage1Certificate& c) {
  const Stage1Node& n = *c.tree->stage1();
  std::string primes;
  std::uint64_t union_bound = 0;
  for (std::uint64_t p : n.primes) {
    primes += (primes.empty() ? "" : ",") + std::to_string(p);
    union_bound += c.modulus / p;
  }
  Record r;
  r["kind"] = "stage1";
  r["k"] = n.k;
  r["delta"] = format_rational(n.delta);
  r["primes"] = primes;
  r["modulus"] = c.modulus;
  r["set_size"] = c.set_size;
  r["difference_set_full"] = c.difference_set_full;
  r["level_sum_size"] = c.level_sum_size;
  r["union_bound"] = union_bound;
  r["density"] = format_rational(c.density);
  r["density_below_delta"] = c.density < n.delta;
  r["accepted"] = c.accepted();
  return r;
}

Record step_record(const StepCertificate& c) {
  const StepNode& n = *c.tree->step();
  Record r;
  r["kind"] = "step";
  r["k"] = c.tree->k();
  r["level"] = n.level;
  r["inner_modulus"] = n.inner->modulus() ? Record(*n.inner->modulus()) : Record(nullptr);
  r["inner_density"] = format_rational(c.inner_density);
  r["delta"] = format_rational(n.delta);
  r["delta_prime"] = format_rational(n.delta_prime);
  r["pair_count"] = n.pair_count;
  r["prime_threshold"] = format_rational(n.prime_threshold);
  r["prime_count"] = n.primes.size();
  r["first_prime"] = n.primes.front();
  r["last_prime"] = n.primes.back();
  r["claimed_density_below_delta_prime"] = less_than(c.claimed_density, n.delta_prime);
  r["claimed_density_approx"] = decimal_prefix(c.claimed_density, 15);
  r["seed"] = c.seed;
  r["samples"] = c.verified_samples;
  r["first_branch_samples"] = c.first_branch_samples;
  r["violations"] = c.violations;
  r["accepted"] = c.accepted();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffsum: sumsets, difference sets and extremal set constructions"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--seed", g.seed, "seed for every randomized step (default 1)");
  app.add_option("--threads", g.threads, "OpenMP thread count (0: runtime default)");
  app.add_option("--config", g.config_path, std::string("config JSON; default from $") + kConfigEnvVar);

  std::function<int()> action;
  auto out_fmt = [&g]() { return g.config.format; };
  auto seed = [&g]() { return g.config.seed; };

  // ---------------------------------------------------------------- oracle
  auto* oracle = app.add_subcommand("oracle", "exact extremal values on small arguments");
  std::string quantity;
  unsigned k = 1;
  std::optional<std::uint64_t> q_opt;
  std::string q_range;
  std::optional<std::uint64_t> diameter;
  oracle->add_option("quantity", quantity, "F G H f g h")->required()->check(CLI::IsMember({"F", "G", "H", "f", "g", "h"}));
  oracle->add_option("--k", k, "summands")->check(CLI::PositiveNumber);
  auto* q_flag = oracle->add_option("--q", q_opt, "target q");
  oracle->add_option("--q-range", q_range, "LO:HI")->excludes(q_flag);
  oracle->add_option("--diameter", diameter, "integer quantities: search A in [0, D] (default: oracle limit)");
  oracle->callback([&] {
    if (!q_opt && q_range.empty()) throw CLI::RequiredError("--q or --q-range");
    action = [&]() {
      const auto [lo, hi] = q_opt ? std::pair{*q_opt, *q_opt} : parse_range(q_range);
      const Quantity qt = parse_quantity(quantity);
      const std::uint64_t d = diameter.value_or(g.config.oracle.max_diameter);
      std::vector<Record> rows;
      for (std::uint64_t q = lo; q <= hi; ++q) {
        const OracleResult r = run_oracle(qt, k, q, d, g.config.oracle);
        if (!witness_valid(r)) throw Error("oracle witness failed re-validation");
        rows.push_back(oracle_record(r));
      }
      cli::emit(std::cout, out_fmt(), rows, static_cast<bool>(q_opt));
      return 0;
    };
  });

  // ----------------------------------------------------------------- table
  auto* table = app.add_subcommand("table", "log-ratio tables with running infimum");
  std::string t_quantity, t_range = "2:13";
  unsigned t_k = 1;
  std::optional<std::uint64_t> t_diameter;
  table->add_option("quantity", t_quantity)->required()->check(CLI::IsMember({"F", "G", "H", "f", "g", "h"}));
  table->add_option("--k", t_k)->check(CLI::PositiveNumber);
  table->add_option("--q-range", t_range, "LO:HI (default 2:13)");
  table->add_option("--diameter", t_diameter);
  table->callback([&] {
    action = [&]() {
      const auto [lo, hi] = parse_range(t_range);
      const ExponentReport rep = exponent_table(parse_quantity(t_quantity), t_k, lo, hi,
                                                t_diameter.value_or(g.config.oracle.max_diameter), g.config.oracle);
      std::vector<Record> rows;
      for (const auto& row : rep.rows) {
        Record r;
        r["quantity"] = std::string(quantity_name(rep.quantity));
        r["k"] = rep.k;
        r["q"] = row.q;
        r["value"] = row.value;
        r["log_ratio"] = fixed(row.log_ratio);
        r["running_inf"] = fixed(row.running_inf);
        r["diameter_bound"] = rep.diameter_bound ? Record(*rep.diameter_bound) : Record(nullptr);
        rows.push_back(r);
      }
      cli::emit(std::cout, out_fmt(), rows);
      return 0;
    };
  });

  // ------------------------------------------------------------- construct
  auto* construct = app.add_subcommand("construct", "recursive construction and certificates");
  construct->require_subcommand(1, 1);
  std::string c_in, c_out, c_delta, c_delta_prime, c_epsilon;
  unsigned c_k = 2;
  std::uint64_t c_samples = 10000;

  auto* stage1 = construct->add_subcommand("stage1", "build and certify a stage-1 set");
  stage1->add_option("--k", c_k)->required()->check(CLI::PositiveNumber);
  stage1->add_option("--delta", c_delta, "density budget NUM/DEN")->required()->check(rational_check());
  stage1->add_option("--out", c_out, "certificate path");
  stage1->callback([&] {
    action = [&]() {
      const Stage1Certificate c =
          certify_stage1(stage1_build(c_k, parse_rational(c_delta)), g.config.materialization_limit);
      if (!c_out.empty()) write_certificate_file(c_out, c);
      if (out_fmt() == OutputFormat::json && c_out.empty()) {
        std::cout << certificate_to_text(c);
      } else {
        cli::emit(std::cout, out_fmt(), {stage1_record(c)}, true);
      }
      return c.accepted() ? 0 : kExitFailure;
    };
  });

  auto* step = construct->add_subcommand("step", "extend a stage-1 certificate by one level");
  step->add_option("--in", c_in, "stage-1 certificate")->required();
  step->add_option("--delta", c_delta, "bound on the inner density (default: its exact value)")->check(rational_check());
  step->add_option("--delta-prime", c_delta_prime, "target density NUM/DEN")->required()->check(rational_check());
  step->add_option("--samples", c_samples, "sampled dichotomy checks");
  step->add_option("--out", c_out, "certificate path");
  step->callback([&] {
    action = [&]() {
      const StepOptions opts = g.config.step_options();
      const Certificate in = read_certificate_file(c_in, opts);
      const auto* inner = std::get_if<Stage1Certificate>(&in);
      if (inner == nullptr) throw LimitError("construct step: only a stage-1 inner tree is materializable");
      DensityBudget budget;
      budget.delta = c_delta.empty() ? inner->density : parse_rational(c_delta);
      budget.delta_prime = parse_rational(c_delta_prime);
      StepBuild b = step_build(*inner->tree, budget, opts);
      step_sample_verify(b.certificate, c_samples, seed(), opts.materialization_limit);
      if (!c_out.empty()) write_certificate_file(c_out, b.certificate);
      cli::emit(std::cout, out_fmt(), {step_record(b.certificate)}, true);
      return b.certificate.accepted() ? 0 : kExitFailure;
    };
  });

  auto* verify = construct->add_subcommand("verify", "re-check a certificate");
  verify->add_option("--in", c_in, "certificate")->required();
  verify->add_option("--samples", c_samples, "sampled dichotomy checks (step certificates)");
  verify->add_option("--out", c_out, "write the re-verified certificate");
  verify->callback([&] {
    action = [&]() {
      const StepOptions opts = g.config.step_options();
      Certificate cert = read_certificate_file(c_in, opts);
      bool ok;
      Record rec;
      if (auto* s = std::get_if<StepCertificate>(&cert)) {
        step_sample_verify(*s, c_samples, seed(), opts.materialization_limit);
        ok = s->accepted();
        rec = step_record(*s);
      } else {
        const auto& c = std::get<Stage1Certificate>(cert);
        ok = c.accepted();
        rec = stage1_record(c);
      }
      if (!c_out.empty()) write_certificate_file(c_out, cert);
      cli::emit(std::cout, out_fmt(), {rec}, true);
      return ok ? 0 : kExitFailure;
    };
  });

  auto* report = construct->add_subcommand("report", "feasibility schedule of the full construction");
  report->add_option("--k", c_k)->required()->check(CLI::PositiveNumber);
  report->add_option("--epsilon", c_epsilon, "NUM/DEN")->required()->check(rational_check());
  report->callback([&] {
    action = [&]() {
      const ConstructionPlan plan = construction_report(c_k, parse_rational(c_epsilon), g.config.step_options());
      std::vector<Record> rows;
      for (const auto& s : plan.stages) {
        Record r;
        r["level"] = s.level;
        r["budget"] = format_rational(s.budget);
        r["status"] = to_string(s.status);
        r["modulus"] = s.modulus;
        r["pair_count"] = s.pair_count.empty() ? Record(nullptr) : Record(s.pair_count);
        r["density"] = s.density.empty() ? Record(nullptr) : Record(s.density);
        r["note"] = s.note;
        rows.push_back(r);
      }
      cli::emit(std::cout, out_fmt(), rows);
      return 0;
    };
  });

  // ----------------------------------------------------------------- check
  auto* check = app.add_subcommand("check", "inequality suite on seeded random sets (CSV by default)");
  bool check_all = false;
  std::vector<std::string> properties, generators;
  std::uint64_t trials = 10000;
  unsigned k_max = 4;
  check->add_flag("--all", check_all, "every property (the default)");
  check->add_option("--property", properties, "restrict to these properties")
      ->check(CLI::IsMember(suite_properties()));
  std::vector<std::string> gen_names;
  for (Generator gen : all_generators()) gen_names.push_back(generator_name(gen));
  check->add_option("--generator", generators, "restrict to these generators")->check(CLI::IsMember(gen_names));
  check->add_option("--trials", trials);
  check->add_option("--k-max", k_max)->check(CLI::Range(1U, 12U));
  check->callback([&] {
    action = [&]() {
      std::vector<Generator> gens;
      for (const auto& n : generators) gens.push_back(parse_generator(n));
      if (gens.empty()) gens = all_generators();
      SuiteOptions opts;
      opts.k_max = k_max;
      if (!check_all) opts.properties = properties;
      const auto outcomes = run_suite(gens, trials, seed(), opts);
      std::vector<Record> rows;
      std::uint64_t violations = 0;
      for (const auto& o : outcomes) {
        Record r;
        r["property"] = o.property;
        r["trials"] = o.trials;
        r["violations"] = o.violations;
        r["worst_margin"] = format_margin(o.worst_margin);
        r["generator"] = o.generator;
        r["seed"] = o.seed;
        rows.push_back(r);
        violations += o.violations;
      }
      cli::emit(std::cout, g.format.empty() ? OutputFormat::csv : out_fmt(), rows);
      return violations == 0 ? 0 : kExitFailure;
    };
  });

  // ------------------------------------------------------------- transform
  auto* transform = app.add_subcommand("transform", "lifts, projections, covers and the H-to-F pipeline");
  transform->require_subcommand(1, 1);
  std::string t_in, t_out;
  unsigned t_kk = 1;
  std::optional<std::uint64_t> t_q, t_a;

  auto* lift = transform->add_subcommand("lift", "doubling lift of a cyclic set");
  lift->add_option("--in", t_in, "cyclic set file")->required();
  lift->add_option("--k", t_kk, "check |kA'| <= 2k|kA|")->check(CLI::PositiveNumber);
  lift->add_option("--out", t_out, "write A'");
  lift->callback([&] {
    action = [&]() {
      const CyclicSet a = read_cyclic(t_in);
      const IntegerSet l = lift_doubling(a);
      const RunReport run = longest_consecutive_run(difference_set(l));
      const std::uint64_t lhs = kfold_sum(l, t_kk).size();
      const std::uint64_t rhs = 2ULL * t_kk * kfold_sum(a, t_kk).size();
      Record r;
      r["q"] = a.modulus();
      r["size"] = a.size();
      r["difference_set_full"] = difference_set(a).is_full();
      r["lift_size"] = l.size();
      r["difference_run"] = run.run_length;
      r["run_start"] = run.run_start;
      r["run_target"] = 2 * a.modulus() + 1;
      r["k"] = t_kk;
      r["kfold_lift"] = lhs;
      r["kfold_bound"] = rhs;
      r["kfold_bound_ok"] = lhs <= rhs;
      r["lift"] = join_members(l);
      maybe_write(t_out, l);
      cli::emit(std::cout, out_fmt(), {r}, true);
      return 0;
    };
  });

  auto* project = transform->add_subcommand("project", "pi_t projection of an integer set");
  project->add_option("--in", t_in, "integer set file")->required();
  project->add_option("--q", t_q, "target modulus (default |S|)");
  project->add_option("--a", t_a, "t = a / 2^64; drawn until |pi_t(S)| > |S|/3 when omitted");
  project->add_option("--out", t_out, "write pi_t(S)");
  project->callback([&] {
    action = [&]() {
      const IntegerSet s = read_integer(t_in);
      ProjectionParam p;
      std::uint64_t attempts = 0;
      if (t_a) {
        if (*t_a == 0) throw PreconditionError("--a must be nonzero");
        p = {*t_a, t_q.value_or(s.size())};
      } else {
        if (t_q && *t_q != s.size()) throw PreconditionError("without --a, q must equal |S|");
        const GoodT gt = find_good_t(s, seed());
        p = gt.param;
        attempts = gt.attempts;
      }
      if (p.q == 0) throw PreconditionError("q must be positive");
      const CyclicSet img = project_set(p, s);
      Record r;
      r["a"] = p.a;
      r["q"] = p.q;
      r["attempts"] = attempts;
      r["input_size"] = s.size();
      r["image_size"] = img.size();
      r["image_above_third"] = 3 * img.size() > s.size();
      r["image"] = join_members(img);
      maybe_write(t_out, img);
      cli::emit(std::cout, out_fmt(), {r}, true);
      return 0;
    };
  });

  auto* cover = transform->add_subcommand("cover", "randomized covering A + B_1 + ... + B_k = Z_q");
  cover->add_option("--in", t_in, "cyclic set file")->required();
  cover->add_option("--k", t_kk)->check(CLI::PositiveNumber);
  cover->callback([&] {
    action = [&]() {
      const CyclicSet a = read_cyclic(t_in);
      const CoverResult c = lorentz_cover(a, t_kk, seed());
      CyclicSet total = a;
      for (const auto& b : c.sets) total = sumset(total, b);
      Record r;
      r["q"] = a.modulus();
      r["size"] = a.size();
      r["k"] = t_kk;
      r["per_set_bound"] = c.per_set_bound;
      r["attempts"] = c.attempts;
      r["bound_exceeded"] = c.bound_exceeded;
      r["complete"] = total.is_full();
      for (std::size_t i = 0; i < c.sets.size(); ++i) r["B" + std::to_string(i + 1)] = join_members(c.sets[i]);
      cli::emit(std::cout, out_fmt(), {r}, true);
      return total.is_full() ? 0 : kExitFailure;
    };
  });

  auto* pipeline = transform->add_subcommand("pipeline", "integer set with |A-A| >= q to A3 with A3-A3 = Z_q");
  pipeline->add_option("--in", t_in, "integer set file")->required();
  pipeline->add_option("--q", t_q)->required();
  pipeline->add_option("--k", t_kk)->check(CLI::PositiveNumber);
  pipeline->add_option("--out", t_out, "write A3");
  pipeline->callback([&] {
    action = [&]() {
      const PipelineResult p = fh_pipeline(read_integer(t_in), *t_q, t_kk, seed());
      const PipelineTrace& t = p.trace;
      Record r;
      r["q"] = t.q;
      r["k"] = t.k;
      r["seed"] = t.seed;
      r["input_size"] = t.input_size;
      r["input_difference_size"] = t.input_difference_size;
      r["input_kfold_size"] = t.input_kfold_size;
      r["retries"] = t.retries;
      r["t_numerator"] = t.t_numerator;
      r["t_attempts"] = t.t_attempts;
      r["image_size"] = t.image_size;
      r["a2_size"] = t.a2_size;
      r["a2_difference_size"] = t.a2_difference_size;
      r["a2_difference_above_sixth"] = 6 * t.a2_difference_size > t.q;
      r["a2_kfold_size"] = t.a2_kfold_size;
      r["cover_bound"] = t.cover_bound;
      r["cover_attempts"] = t.cover_attempts;
      r["b1"] = join_members(p.b1);
      r["b2"] = join_members(p.b2);
      r["b_union_size"] = t.b_union_size;
      r["a3_size"] = t.a3_size;
      r["a3_kfold_size"] = t.a3_kfold_size;
      r["kfold_ratio"] = fixed(static_cast<double>(t.a3_kfold_size) / static_cast<double>(t.a2_kfold_size));
      r["a3_difference_full"] = t.a3_difference_full;
      r["a3"] = join_members(p.a3);
      maybe_write(t_out, p.a3);
      cli::emit(std::cout, out_fmt(), {r}, true);
      return t.a3_difference_full ? 0 : kExitFailure;
    };
  });

  auto* witness = transform->add_subcommand("witness", "composite witnesses from two smaller ones");
  std::string w_kind, w_a1, w_a2;
  witness->add_option("--kind", w_kind)->required()->check(CLI::IsMember({"product", "base-q", "spread"}));
  witness->add_option("--a1", w_a1, "first set file")->required();
  witness->add_option("--a2", w_a2, "second set file")->required();
  witness->add_option("--q1", t_q, "base-q: the run length of A1's difference set");
  witness->add_option("--k", t_kk)->check(CLI::PositiveNumber);
  witness->add_option("--out", t_out, "write the composite");
  witness->callback([&] {
    if (w_kind == "base-q" && !t_q) throw CLI::RequiredError("--q1 (for --kind base-q)");
    action = [&]() {
      Record r;
      r["kind"] = w_kind;
      r["k"] = t_kk;
      AnySet out = IntegerSet{};
      if (w_kind == "product") {
        const CyclicSet a1 = read_cyclic(w_a1), a2 = read_cyclic(w_a2);
        const CyclicSet w = witness_product(a1, a2);
        r["modulus"] = w.modulus();
        r["size"] = w.size();
        r["difference_set_full"] = difference_set(w).is_full();
        r["kfold_size"] = kfold_sum(w, t_kk).size();
        r["kfold_product"] = kfold_sum(a1, t_kk).size() * kfold_sum(a2, t_kk).size();
        out = w;
      } else {
        const IntegerSet a1 = read_integer(w_a1), a2 = read_integer(w_a2);
        const IntegerSet w = w_kind == "spread" ? witness_spread(a1, a2, t_kk) : witness_base_q(a1, *t_q, a2);
        if (w_kind == "spread") r["factor"] = spread_factor(a1, t_kk);
        r["size"] = w.size();
        r["difference_size"] = difference_set(w).size();
        r["difference_product"] = difference_set(a1).size() * difference_set(a2).size();
        r["difference_run"] = longest_consecutive_run(difference_set(w)).run_length;
        r["kfold_size"] = kfold_sum(w, t_kk).size();
        r["kfold_product"] = kfold_sum(a1, t_kk).size() * kfold_sum(a2, t_kk).size();
        out = w;
      }
      r["set"] = members(out);
      maybe_write(t_out, out);
      cli::emit(std::cout, out_fmt(), {r}, true);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (g.config_path.empty()) {
      g.config = load_default_config();
    } else {
      std::ifstream in(g.config_path);
      if (!in) throw FormatError("config: cannot open '" + g.config_path + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      apply_config_text(g.config, ss.str());
    }
    if (!g.format.empty()) g.config.format = parse_format(g.format);
    if (g.seed) g.config.seed = *g.seed;
    if (g.threads) g.config.threads = *g.threads;
    if (g.config.threads > 0) omp_set_num_threads(static_cast<int>(g.config.threads));
  } catch (const Error& e) {
    std::cerr << "diffsum: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    return action();
  } catch (const PreconditionError& e) {
    std::cerr << "diffsum: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "diffsum: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "diffsum: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "diffsum: " << e.what() << '\n';
    return kExitFailure;
  }
}
