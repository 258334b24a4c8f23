#include "diffsum/certificate.hpp"

#include "diffsum/errors.hpp"
#include "diffsum/rational.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace diffsum {

namespace {

using json = nlohmann::ordered_json;

json stage1_json(const Stage1Certificate& c) {
  const Stage1Node& n = *c.tree->stage1();
  json j;
  j["kind"] = "stage1";
  j["k"] = n.k;
  j["delta"] = format_rational(n.delta);
  j["primes"] = n.primes;
  j["modulus"] = c.modulus;
  j["set_size"] = c.set_size;
  j["difference_set_full"] = c.difference_set_full;
  j["level_sum_size"] = c.level_sum_size;
  j["density"] = format_rational(c.density);
  return j;
}

json step_json(const StepCertificate& c) {
  const StepNode& n = *c.tree->step();
  if (n.inner->stage1() == nullptr) throw DomainError("certificate: only stage-1 inner trees are supported");
  json j;
  j["kind"] = "step";
  j["k"] = c.tree->k();
  j["level"] = n.level;
  j["inner"] = stage1_json(certify_stage1(*n.inner));
  j["pair_count"] = n.pair_count;
  j["delta"] = format_rational(n.delta);
  j["delta_prime"] = format_rational(n.delta_prime);
  j["inner_density"] = format_rational(c.inner_density);
  json primes;
  primes["threshold"] = format_rational(n.prime_threshold);
  primes["count"] = n.primes.size();
  primes["first"] = n.primes.empty() ? 0 : n.primes.front();
  primes["last"] = n.primes.empty() ? 0 : n.primes.back();
  if (n.primes.size() <= kMaxRecordedPrimes) primes["list"] = n.primes;
  j["primes"] = std::move(primes);
  j["claimed_density_below_delta_prime"] = less_than(c.claimed_density, n.delta_prime);
  j["claimed_density_approx"] = decimal_prefix(c.claimed_density, 15);
  j["seed"] = c.seed;
  j["samples"] = c.verified_samples;
  j["first_branch_samples"] = c.first_branch_samples;
  j["violations"] = c.violations;
  j["accepted"] = c.accepted();
  return j;
}

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw FormatError(std::string("certificate: missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("certificate: bad field '") + name + "': " + e.what());
  }
}

void expect_equal(bool ok, const char* what) {
  if (!ok) throw FormatError(std::string("certificate: recorded ") + what + " does not match recomputation");
}

Stage1Certificate stage1_from_json(const json& j, const StepOptions& options) {
  if (field<std::string>(j, "kind") != "stage1") throw FormatError("certificate: expected kind stage1");
  const ConstructionTree tree = stage1_from_primes(field<unsigned>(j, "k"), parse_rational(field<std::string>(j, "delta")),
                                                   field<std::vector<std::uint64_t>>(j, "primes"));
  Stage1Certificate c = certify_stage1(tree, options.materialization_limit);
  expect_equal(c.modulus == field<std::uint64_t>(j, "modulus"), "modulus");
  expect_equal(c.set_size == field<std::uint64_t>(j, "set_size"), "set_size");
  expect_equal(c.difference_set_full == field<bool>(j, "difference_set_full"), "difference_set_full");
  expect_equal(c.level_sum_size == field<std::uint64_t>(j, "level_sum_size"), "level_sum_size");
  expect_equal(c.density == parse_rational(field<std::string>(j, "density")), "density");
  return c;
}

StepCertificate step_from_json(const json& j, const StepOptions& options) {
  if (field<std::string>(j, "kind") != "step") throw FormatError("certificate: expected kind step");
  const Stage1Certificate inner = stage1_from_json(field<json>(j, "inner"), options);
  DensityBudget budget;
  budget.delta = parse_rational(field<std::string>(j, "delta"));
  budget.delta_prime = parse_rational(field<std::string>(j, "delta_prime"));
  const json primes = field<json>(j, "primes");
  StepBuild b = primes.contains("list")
                    ? step_from_primes(*inner.tree, budget, field<std::vector<std::uint64_t>>(primes, "list"), options)
                    : step_build(*inner.tree, budget, options);
  const StepNode& n = *b.tree.step();
  expect_equal(n.level == field<unsigned>(j, "level"), "level");
  expect_equal(b.tree.k() == field<unsigned>(j, "k"), "k");
  expect_equal(n.pair_count == field<std::uint64_t>(j, "pair_count"), "pair_count");
  expect_equal(n.prime_threshold == parse_rational(field<std::string>(primes, "threshold")), "prime threshold");
  expect_equal(n.primes.size() == field<std::uint64_t>(primes, "count"), "prime count");
  expect_equal(n.primes.front() == field<std::uint64_t>(primes, "first"), "first prime");
  expect_equal(n.primes.back() == field<std::uint64_t>(primes, "last"), "last prime");
  expect_equal(b.certificate.inner_density == parse_rational(field<std::string>(j, "inner_density")), "inner density");
  expect_equal(field<bool>(j, "claimed_density_below_delta_prime"), "claimed density bound");
  StepCertificate c = std::move(b.certificate);
  c.seed = field<std::uint64_t>(j, "seed");
  c.verified_samples = field<std::uint64_t>(j, "samples");
  c.first_branch_samples = field<std::uint64_t>(j, "first_branch_samples");
  c.violations = field<std::uint64_t>(j, "violations");
  return c;
}

}  // namespace

bool Stage1Certificate::accepted() const {
  return difference_set_full && tree && tree->stage1() && density < tree->stage1()->delta;
}

Stage1Certificate certify_stage1(const ConstructionTree& tree, std::uint64_t materialization_limit) {
  if (tree.stage1() == nullptr) throw PreconditionError("certify_stage1: not a stage-1 tree");
  const CyclicSet a = materialize_set(tree, materialization_limit);
  const CyclicSet s1 = compute_level_sums(tree, 1, {}, materialization_limit);
  Stage1Certificate c;
  c.tree = std::make_shared<const ConstructionTree>(tree);
  c.modulus = a.modulus();
  c.set_size = a.size();
  c.difference_set_full = difference_set(a).is_full();
  c.level_sum_size = s1.size();
  c.density = mpq_class(mpz_class(std::to_string(s1.size())), mpz_class(std::to_string(c.modulus)));
  c.density.canonicalize();
  return c;
}

std::string decimal_prefix(const BigFraction& f, unsigned digits) {
  mpz_class scaled = f.num * ipow(mpz_class(10), digits);
  mpz_class quot;
  mpz_fdiv_q(quot.get_mpz_t(), scaled.get_mpz_t(), f.den.get_mpz_t());
  std::string s = quot.get_str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return s;
}

std::string certificate_to_text(const Certificate& cert) {
  const json j = std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Stage1Certificate>) {
          return stage1_json(c);
        } else {
          return step_json(c);
        }
      },
      cert);
  return j.dump(2) + "\n";
}

Certificate certificate_from_text(const std::string& text, const StepOptions& options) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("certificate: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("certificate: top level must be an object");
  const auto kind = field<std::string>(j, "kind");
  if (kind == "stage1") return stage1_from_json(j, options);
  if (kind == "step") return step_from_json(j, options);
  throw FormatError("certificate: unknown kind '" + kind + "'");
}

void write_certificate_file(const std::string& path, const Certificate& cert) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << certificate_to_text(cert);
  if (!out) throw FormatError("write to '" + path + "' failed");
}

Certificate read_certificate_file(const std::string& path, const StepOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return certificate_from_text(ss.str(), options);
}

}  // namespace diffsum
