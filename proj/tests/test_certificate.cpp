#include "doctest.h"

#include "diffsum/certificate.hpp"
#include "diffsum/config.hpp"
#include "diffsum/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace diffsum;
using json = nlohmann::ordered_json;

TEST_CASE("stage-1 certificate content and round trip") {
  const Stage1Certificate c = certify_stage1(stage1_build(2, mpq_class(1, 2)));
  CHECK(c.modulus == 1001);
  CHECK(c.set_size == 209);
  CHECK(c.difference_set_full);
  CHECK(c.level_sum_size == 281);
  CHECK(c.density == mpq_class(281, 1001));
  CHECK(c.accepted());

  const std::string text = certificate_to_text(c);
  const json j = json::parse(text);
  CHECK(j["kind"] == "stage1");
  CHECK(j["primes"] == json::array({7, 11, 13}));
  CHECK(j["delta"] == "1/2");
  CHECK(j["density"] == "281/1001");

  const Certificate back = certificate_from_text(text);
  REQUIRE(std::holds_alternative<Stage1Certificate>(back));
  CHECK(certificate_to_text(back) == text);
}

TEST_CASE("tampered certificates are rejected") {
  const std::string text = certificate_to_text(certify_stage1(stage1_build(2, mpq_class(1, 2))));
  json j = json::parse(text);
  j["set_size"] = 210;
  CHECK_THROWS_AS(certificate_from_text(j.dump()), FormatError);
  j = json::parse(text);
  j["primes"] = json::array({7, 11, 15});
  CHECK_THROWS_AS(certificate_from_text(j.dump()), PreconditionError);
  j = json::parse(text);
  j.erase("modulus");
  CHECK_THROWS_AS(certificate_from_text(j.dump()), FormatError);
  j = json::parse(text);
  j["kind"] = "other";
  CHECK_THROWS_AS(certificate_from_text(j.dump()), FormatError);
  CHECK_THROWS_AS(certificate_from_text("{not json"), FormatError);
  CHECK_THROWS_AS(certificate_from_text("[1,2]"), FormatError);
}

TEST_CASE("step certificate round trip") {
  StepBuild b = step_build(stage1_build(2, mpq_class(3, 4)), {mpq_class(29, 77), mpq_class(1, 2), 0});
  step_sample_verify(b.certificate, 200, 9);
  const std::string text = certificate_to_text(b.certificate);
  const json j = json::parse(text);
  CHECK(j["kind"] == "step");
  CHECK(j["pair_count"] == 295680);
  CHECK(j["primes"]["count"] == 295680);
  CHECK(j["primes"]["threshold"] == "45534720/19");
  CHECK(j["primes"]["list"].size() == 295680);
  CHECK(j["inner"]["modulus"] == 385);
  CHECK(j["inner"]["level_sum_size"] == 145);
  CHECK(j["inner_density"] == "29/77");
  CHECK(j["claimed_density_below_delta_prime"] == true);
  CHECK(j["violations"] == 0);
  CHECK(j["samples"] == 200);
  CHECK(j["seed"] == 9);
  const std::string approx = j["claimed_density_approx"];
  CHECK(approx.rfind("0.4", 0) == 0);

  const Certificate back = certificate_from_text(text);
  REQUIRE(std::holds_alternative<StepCertificate>(back));
  CHECK(certificate_to_text(back) == text);

  // a wrong prime in the list is caught
  json bad = j;
  bad["primes"]["list"][5] = bad["primes"]["list"][5].get<std::uint64_t>() + 1;
  CHECK_THROWS_AS(certificate_from_text(bad.dump()), PreconditionError);
  // without the list the sieve regenerates the same primes
  json nolist = j;
  nolist["primes"].erase("list");
  const Certificate regen = certificate_from_text(nolist.dump());
  CHECK(std::get<StepCertificate>(regen).tree->step()->primes == b.tree.step()->primes);
}

TEST_CASE("decimal_prefix truncates") {
  CHECK(decimal_prefix({mpz_class(1), mpz_class(3)}, 5) == "0.33333");
  CHECK(decimal_prefix({mpz_class(2), mpz_class(3)}, 3) == "0.666");
  CHECK(decimal_prefix({mpz_class(7), mpz_class(2)}, 2) == "3.50");
}

TEST_CASE("run configuration") {
  RunConfig c;
  CHECK(c.seed == kDefaultSeed);
  CHECK(c.oracle.max_q == 26);
  apply_config_text(c, R"({"seed": 7, "oracle_max_q": 30, "format": "csv"})");
  CHECK(c.seed == 7);
  CHECK(c.oracle.max_q == 30);
  CHECK(c.format == OutputFormat::csv);
  CHECK_THROWS_AS(apply_config_text(c, R"({"sed": 7})"), FormatError);
  CHECK_THROWS_AS(apply_config_text(c, R"({"seed": "x"})"), FormatError);
  CHECK_THROWS_AS(apply_config_text(c, R"({"oracle_max_q": 0})"), DomainError);
  CHECK_THROWS_AS(apply_config_text(c, R"({"format": "xml"})"), DomainError);

  const auto path = std::filesystem::temp_directory_path() / "diffsum_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"seed": 99, "materialization_limit": 5000})";
  }
  setenv(kConfigEnvVar, path.c_str(), 1);
  const RunConfig d = load_default_config();
  CHECK(d.seed == 99);
  CHECK(d.materialization_limit == 5000);
  setenv(kConfigEnvVar, "/nonexistent/diffsum.json", 1);
  CHECK_THROWS_AS(load_default_config(), FormatError);
  unsetenv(kConfigEnvVar);
  CHECK(load_default_config().seed == kDefaultSeed);
  std::filesystem::remove(path);
}
