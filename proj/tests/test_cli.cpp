#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pillai/pillai.hpp"

using namespace pillai;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + PILLAI_CLI + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scratch(const std::string& name) { return std::string(PILLAI_SCRATCH_DIR) + "/cli_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SearchFormats) {
  const Outcome table = cli("search");
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("22\t(16, 3) (22, 5)"), std::string::npos) << table.out;
  EXPECT_NE(table.out.find("5 value(s)"), std::string::npos);

  const Outcome csv = cli("search --format csv --convention stated");
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("c,n,m\n", 0), 0u);
  EXPECT_NE(csv.out.find("\n3,7,0\n3,11,2\n"), std::string::npos) << csv.out;

  const Outcome json = cli("search --format json --threads 4");
  ASSERT_EQ(json.code, 0);
  const Json j = Json::parse(json.out);
  EXPECT_EQ(j["solutions"].size(), 5u);
  EXPECT_EQ(j["solutions"][4]["c"], "87");
  EXPECT_EQ(cli("search --format json").out, json.out);
}

TEST(Cli, SearchWritesToFileAndHandlesEmptyRanges) {
  const std::string path = scratch("search.csv");
  EXPECT_EQ(cli("search --format csv --out " + path).code, 0);
  EXPECT_EQ(slurp(path), cli("search --format csv").out);
  const Outcome empty = cli("search --nmax 0 --format json");
  EXPECT_EQ(empty.code, 0);
  EXPECT_TRUE(Json::parse(empty.out)["solutions"].empty());
  const Outcome custom = cli("search --nmin 0 --mmin 0 --nmax 30 --mmax 10 --base 2 --format csv");
  EXPECT_EQ(custom.code, 0);
  EXPECT_EQ(cli("search --config " + std::string(PILLAI_CONFIG_DIR) + "/padovan.conf --format csv").out,
            cli("search --format csv").out);
}

TEST(Cli, ContinuedFractions) {
  const Outcome text = cli("cf --expr 'log(alpha)/log(3)' --terms 18 --convergent 88");
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("quotients: 0, 3, 1, 9, 1, 2, 1, 4, 1, 2, 2, 1, 1, 3, 1, 2, 1, 20\n"), std::string::npos)
      << text.out;
  EXPECT_NE(text.out.find("q_88 = 12201370578769620000479260876419428374896683408344"), std::string::npos);

  const Outcome json = cli("cf --expr 'log(3)/log(alpha)' --terms 10 --format json");
  ASSERT_EQ(json.code, 0);
  const Json j = Json::parse(json.out);
  std::vector<std::string> q;
  for (const auto& x : j["quotients"]) q.push_back(x.get<std::string>());
  EXPECT_EQ(q, (std::vector<std::string>{"3", "1", "9", "1", "2", "1", "4", "1", "2", "2"}));

  const Outcome big =
      cli("cf --expr 'log(alpha)/log(3)' --qmin 120000000000000000000000000000000000000000000000 --format json");
  ASSERT_EQ(big.code, 0);
  EXPECT_EQ(Json::parse(big.out)["quotients"].size(), 89u);
}

TEST(Cli, ContinuedFractionUsageErrors) {
  EXPECT_EQ(cli("cf --expr 'log(2)/log(2)' --terms 5").code, 2);
  EXPECT_EQ(cli("cf --expr 'log(alpha)/log(alpha)' --terms 5").code, 2);
  EXPECT_EQ(cli("cf --expr 'sqrt(2)' --terms 5").code, 2);
  EXPECT_EQ(cli("cf --expr 'log(alpha)/log(3)'").code, 2);
  EXPECT_EQ(cli("cf --terms 5").code, 2);
}

TEST(Cli, CertifyThenVerify) {
  const std::string path = scratch("cert.json");
  EXPECT_EQ(cli("certify --out " + path).code, 0);
  const Json cert = Json::parse(slurp(path));
  EXPECT_TRUE(cert["final_conclusion"]["consistent"].get<bool>());
  EXPECT_FALSE(cert.contains("generated_at"));
  const Outcome v = cli("verify --cert " + path);
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "certificate verified\n");

  Json bad = cert;
  bad["final_conclusion"]["threshold_n"] = 10;
  const std::string tampered = scratch("tampered.json");
  std::ofstream(tampered) << bad.dump();
  EXPECT_EQ(cli("verify --cert " + tampered).code, 1);
  std::ofstream(scratch("garbage.json")) << "{not json";
  EXPECT_EQ(cli("verify --cert " + scratch("garbage.json")).code, 1);
  EXPECT_EQ(cli("verify --cert " + scratch("absent.json")).code, 2);
}

TEST(Cli, CertifyModesAndTimestamp) {
  const std::string path = scratch("strict.json");
  EXPECT_EQ(cli("certify --mode strict --timestamp --threads 2 --out " + path).code, 0);
  const Json cert = Json::parse(slurp(path));
  EXPECT_EQ(cert["final_conclusion"]["threshold_n"], 450);
  EXPECT_TRUE(cert.contains("generated_at"));
  EXPECT_EQ(cli("verify --cert " + path).code, 0);
}

TEST(Cli, CertifyFailureExitCodes) {
  EXPECT_EQ(cli("certify --out " + scratch("capped.json"), "PILLAI_MAX_BITS=8").code, 3);
  EXPECT_EQ(cli("certify --config " + std::string(PILLAI_CONFIG_DIR) + "/fibonacci.conf --out " + scratch("fib.json")).code,
            1);
  std::ofstream(scratch("bad.conf")) << "recurrence.order = 3\nnonsense = 1\n";
  EXPECT_EQ(cli("certify --config " + scratch("bad.conf")).code, 2);
  EXPECT_EQ(cli("certify --config " + scratch("absent.conf")).code, 2);
  EXPECT_EQ(cli("certify --mode lenient").code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("search --format xml").code, 2);
  EXPECT_EQ(cli("search --nmax -3").code, 2);
  EXPECT_EQ(cli("search --base 1").code, 2);
  EXPECT_EQ(cli("verify").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, SequenceTerms) {
  const Outcome r = cli("sequence --from 20 --count 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "20\t151\n21\t200\n22\t265\n");
  EXPECT_EQ(cli("sequence --name fibonacci --from 10 --count 1").out, "10\t55\n");
  EXPECT_EQ(cli("sequence --name lucas").code, 2);
}
