#include <stdexcept>

#include "support.hpp"
#include "tubesol/cli/pipeline.hpp"

using namespace tubesol;

namespace {

const char* kDocument = R"(# sample
n = 1
p = 3
k = 1
R = 1
eps = 0.2
i_max = 6
N = 4
N0 = 0
M = auto
nt = auto
nz = 64
tol = 1e-12
seed = 42
)";

cli::KeyValues document() {
  std::istringstream in(kDocument);
  return cli::parse_document(in);
}

std::string error_text(const cli::KeyValues& kv) {
  try {
    cli::interpret(kv);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("canonical form round trips", "[cli]") {
  const auto c = cli::interpret(document());
  CHECK(c.params.n == 1);
  CHECK(c.params.p == 3.0);
  CHECK_FALSE(c.M.has_value());
  CHECK_FALSE(c.nt.has_value());
  CHECK(c.seed == 42u);
  const std::string text = cli::canonical(c);
  CHECK(cli::canonical(cli::parse_config(text)) == text);
  CHECK(cli::config_hash(cli::parse_config(text)) == cli::config_hash(c));
}

TEST_CASE("hash follows the configuration", "[cli]") {
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  auto kv = document();
  const std::string base = cli::config_hash(cli::interpret(kv));
  cli::apply_override(kv, "eps=0.15");
  CHECK(cli::config_hash(cli::interpret(kv)) != base);
  // Formatting differences do not change the canonical form.
  auto spaced = document();
  spaced["p"] = "3.0";
  CHECK(cli::config_hash(cli::interpret(spaced)) == base);
}

TEST_CASE("configuration errors name the key", "[cli]") {
  auto missing = document();
  missing.erase("nz");
  CHECK(error_text(missing).find("'nz'") != std::string::npos);
  auto unknown = document();
  unknown["radius"] = "1";
  CHECK(error_text(unknown).find("'radius'") != std::string::npos);
  auto even = document();
  even["nt"] = "10";
  CHECK(error_text(even).find("'nt'") != std::string::npos);
  auto coarse = document();
  coarse["nz"] = "32";
  CHECK(error_text(coarse).find("'nz'") != std::string::npos);
  auto surface = document();
  surface["k"] = "2";
  CHECK(error_text(surface).find("'k'") != std::string::npos);
  std::istringstream twice("n = 1\nn = 2\n");
  REQUIRE_KIND(cli::parse_document(twice), ErrorKind::ConfigError);
}

TEST_CASE("sweep spacing", "[cli]") {
  auto c = cli::interpret(document());
  c.eps_lo = 0.05;
  c.eps_hi = 0.2;
  c.count = 3;
  const auto log = c.sweep();
  CHECK(log[1] == Catch::Approx(0.1).epsilon(1e-12));
  c.spacing = cli::Spacing::Linear;
  CHECK(c.sweep()[1] == Catch::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("parallel map keeps order and rethrows the first failure", "[cli]") {
  const std::vector<int> in{1, 2, 3, 4, 5, 6, 7};
  CHECK(cli::parallel_map(in, [](int x) { return x * x; }) == std::vector<int>{1, 4, 9, 16, 25, 36, 49});
  try {
    cli::parallel_map(in, [](int x) {
      if (x >= 3) throw std::runtime_error("bad " + std::to_string(x));
      return x;
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "bad 3");
  }
}

TEST_CASE("seeded random-field checks are reproducible", "[cli]") {
  const auto c = cli::interpret(document());
  const auto a = cli::random_field_checks(c, 4), b = cli::random_field_checks(c, 4);
  CHECK(a.rows == b.rows);
  for (const auto& row : a.rows) CHECK(row[1] <= row[2]);
  auto other = c;
  other.seed = 43;
  CHECK(cli::random_field_checks(other, 4).rows != a.rows);
}

TEST_CASE("artifacts carry the config hash", "[cli]") {
  const auto c = cli::interpret(document());
  const auto dir = std::filesystem::temp_directory_path() / "tubesol_cli_artifacts";
  std::filesystem::remove_all(dir);
  cli::write_artifacts(dir, c, cli::run("spectrum", c));
  std::ifstream in(dir / "base_spectrum.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first == "# config_hash=" + cli::config_hash(c));
  std::filesystem::remove_all(dir);
  REQUIRE_KIND(cli::run("bogus", c), ErrorKind::ConfigError);
}
