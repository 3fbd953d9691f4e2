#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "calderon/error.hpp"
#include "calderon_cli/runner.hpp"

using namespace calderon;
using namespace calderon::cli;

namespace {

const std::filesystem::path kScratch = std::filesystem::temp_directory_path() / "calderon_cli_test";

ErrorCode parse_code(const nlohmann::json& doc, const std::string& command) {
  try {
    parse_config(doc, command, kScratch);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted " << doc.dump();
  return ErrorCode::kInvalidArgument;
}

std::filesystem::path write_config(const std::string& name, const nlohmann::json& doc) {
  std::filesystem::create_directories(kScratch);
  const auto path = kScratch / name;
  std::ofstream(path) << doc.dump(2);
  return path;
}

int run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " CALDERON_LAB_BINARY " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const nlohmann::json kRigidity = {{"command", "rigidity-check"},
                                  {"grid", {{"nt", 7}}},
                                  {"samples", 2},
                                  {"metric", {{"kind", "random_smooth"}, {"amplitude", 0.3}}}};

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const ExperimentConfig c = parse_config(kRigidity, "rigidity-check", kScratch);
  EXPECT_EQ(c.dim, 3);
  EXPECT_EQ(c.nt, 7);
  EXPECT_EQ(c.samples, 2);
  EXPECT_EQ(c.grid_for(7).extent(2), 6);
  EXPECT_EQ(c.tolerance("rigidity", 1e-10), 1e-10);
  EXPECT_EQ(c.resolve("x.json"), kScratch / "x.json");
  EXPECT_EQ(c.resolve("/abs/x.json"), std::filesystem::path("/abs/x.json"));
}

TEST(Config, RejectsSchemaViolations) {
  auto doc = kRigidity;
  doc["gird"] = 1;
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  doc = kRigidity;
  doc["samples"] = "two";
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  doc = kRigidity;
  doc["gamma"] = "gamma2";
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  doc = kRigidity;
  doc["dim"] = 7;
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  doc = kRigidity;
  doc["eps"] = {0.1, -0.2};
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  doc = kRigidity;
  doc["metric"] = {{"kind", "random_smooth"}, {"amplitude", 1.5}};
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  doc = kRigidity;
  doc["grid"]["nt"] = 2;
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(parse_code(kRigidity, "dn-compare"), ErrorCode::kConfigInvalid);
  EXPECT_EQ(parse_code(kRigidity, "make-coffee"), ErrorCode::kConfigInvalid);
}

TEST(Config, ReferencedFilesMustExist) {
  nlohmann::json doc = {{"command", "validate-dataset"}, {"params", {{"dataset", "nowhere.json"}}}};
  EXPECT_EQ(parse_code(doc, "validate-dataset"), ErrorCode::kConfigInvalid);
  doc = {{"command", "rigidity-check"}, {"metric", {{"kind", "dataset"}, {"path", "nowhere.json"}}}};
  EXPECT_EQ(parse_code(doc, "rigidity-check"), ErrorCode::kConfigInvalid);
}

TEST(Config, DigestIsStableAndSensitive) {
  EXPECT_EQ(digest(kRigidity), digest(nlohmann::json::parse(kRigidity.dump())));
  auto other = kRigidity;
  other["seed"] = 2;
  EXPECT_NE(digest(kRigidity), digest(other));
  EXPECT_EQ(digest(kRigidity).size(), 16u);
}

TEST(Runner, MismatchedBoundarySetsAreConfigErrors) {
  nlohmann::json doc = {{"command", "dn-compare"},
                        {"dim", 2},
                        {"refinements", {9, 17}},
                        {"params", {{"mode", "diffeo"}, {"gamma_a", "gamma0"}, {"gamma_b", "gamma1"}}}};
  const ExperimentConfig c = parse_config(doc, "dn-compare", kScratch);
  try {
    run(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
  }
}

TEST(Runner, IdentityCheckOnFlatGrid) {
  nlohmann::json doc = {{"command", "verify-identities"},
                        {"refinements", {9, 17}},
                        {"params", {{"identity_tuples", 4}, {"scaling_tuples", 1}}}};
  const ExperimentReport r = run(parse_config(doc, "verify-identities", kScratch));
  EXPECT_LE(r.scalars.at("identity.max_error"), 1e-12);
  EXPECT_EQ(r.verdicts.front().rule, "identity.max_error");
  EXPECT_TRUE(r.verdicts.front().passed);
  EXPECT_EQ(r.tables.at("identity").rows.size(), 4u);
}

TEST(Runner, ZeroDatasetStudyHasZeroGaps) {
  nlohmann::json doc = {{"command", "counterexample-study"},
                        {"grid", {{"nt", 17}}},
                        {"eps", {0.05, 0.1, 0.2}},
                        {"params", {{"dataset", "zero"}, {"factors", {2}}}}};
  const ExperimentReport r = run(parse_config(doc, "counterexample-study", kScratch));
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.scalars.at("zero_dataset.max_gap"), 1e-10);
  EXPECT_EQ(r.details.at("nonisometry"), "skipped: TrivialU");
}

TEST(Runner, ObservedOrders) {
  const auto p = observed_orders({1.0, 0.25, 0.0625}, {0.1, 0.05, 0.025});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0], 2.0, 1e-14);
  EXPECT_NEAR(p[1], 2.0, 1e-14);
}

TEST(Report, JsonRoundTripIsBitExact) {
  ExperimentReport r;
  r.command = "rigidity-check";
  r.scalars["third"] = 1.0 / 3.0;
  r.scalars["tiny"] = 4.9406564584124654e-324;
  r.scalars["pi"] = 3.141592653589793;
  r.tables["t"] = {{"a", "b"}, {{0.1, std::string("x")}, {2.0 / 7.0, std::string("y")}}};
  r.verdicts.push_back(check_at_most("rule.one", 1e-13, 1e-12));
  const nlohmann::json back = nlohmann::json::parse(to_json(r).dump());
  for (const auto& [k, v] : r.scalars) EXPECT_EQ(back.at("scalars").at(k).get<double>(), v);
  EXPECT_EQ(back.at("tables").at("t").at("rows")[1][0].get<double>(), 2.0 / 7.0);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, EmptyReportIsValidJson) {
  ExperimentReport r;
  r.command = "validate-dataset";
  r.tables["empty"] = {{"a"}, {}};
  const nlohmann::json j = nlohmann::json::parse(to_json(r).dump());
  EXPECT_TRUE(j.at("verdicts").is_array());
  EXPECT_TRUE(j.at("verdicts").empty());
  EXPECT_TRUE(j.at("tables").at("empty").at("rows").empty());
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_EQ(to_csv(r.tables["empty"]), "a\n");
}

TEST(Report, MarkdownListsEveryVerdict) {
  ExperimentReport r;
  r.command = "dn-compare";
  r.verdicts = {check_at_least("order.a", 1.9, 1.5), check_within("order.b", 2.4, 1.7, 2.3),
                check_greater("coef", 0.2, 0.0)};
  const std::string md = to_markdown(r);
  const nlohmann::json j = to_json(r);
  for (const auto& v : j.at("verdicts")) {
    const std::string rule = v.at("rule");
    EXPECT_NE(md.find("| " + rule + " | " + format_double(v.at("value").get<double>())), std::string::npos) << rule;
  }
  EXPECT_NE(md.find("FAIL"), std::string::npos);
  EXPECT_FALSE(r.passed());
}

TEST(Report, EmitWritesAllArtifactsDeterministically) {
  const ExperimentConfig c = parse_config(kRigidity, "rigidity-check", kScratch);
  const auto a = kScratch / "emit_a";
  const auto b = kScratch / "emit_b";
  emit_report(run(c), a);
  emit_report(run(c), b);
  for (const char* f : {"report.json", "summary.md", "rigidity.csv", "timings.json"}) {
    EXPECT_TRUE(std::filesystem::exists(a / f)) << f;
  }
  EXPECT_EQ(read_file(a / "report.json"), read_file(b / "report.json"));
  EXPECT_EQ(read_file(a / "rigidity.csv"), read_file(b / "rigidity.csv"));
  EXPECT_EQ(nlohmann::json::parse(read_file(a / "report.json")).count("timings"), 0u);
}

TEST(Binary, ExitCodes) {
  const auto good = write_config("good.json", kRigidity);
  const std::string out = " --out " + (kScratch / "bin_out").string();
  EXPECT_EQ(run_binary("rigidity-check --config " + good.string() + out), 0);
  EXPECT_EQ(run_binary("rigidity-check --config " + good.string() + out + " --threads 2"), 0);

  auto strict = kRigidity;
  strict["tolerances"] = {{"rigidity", 0.0}};
  strict["metric"]["amplitude"] = 0.6;
  const auto failing = write_config("strict.json", strict);
  EXPECT_EQ(run_binary("rigidity-check --config " + failing.string() + out), 1);

  auto bad = kRigidity;
  bad["unknown"] = true;
  EXPECT_EQ(run_binary("rigidity-check --config " + write_config("bad.json", bad).string() + out), 2);
  EXPECT_EQ(run_binary("rigidity-check --config " + (kScratch / "absent.json").string() + out), 2);
  EXPECT_EQ(run_binary("rigidity-check" + out), 2);
  EXPECT_EQ(run_binary("dn-compare --config " + good.string() + out), 2);
  EXPECT_EQ(run_binary("rigidity-check --config " + good.string() + out, "CALDERON_LAB_THREADS=abc"), 2);
  EXPECT_EQ(run_binary("rigidity-check --config " + good.string() + out, "CALDERON_LAB_THREADS=2"), 0);
}

TEST(Binary, ShippedConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(CALDERON_CONFIG_DIR)) {
    const auto doc = nlohmann::json::parse(read_file(entry.path()));
    const std::string command = doc.at("command");
    if (command == "validate-dataset") continue;  // needs a synthesized file first
    EXPECT_NO_THROW(load_config(entry.path(), command)) << entry.path();
  }
}
