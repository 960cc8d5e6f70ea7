#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spatial/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRoom = R"({"objects": [
  {"id": "floor", "x": 0, "y": -0.05, "z": 0, "w": 6, "h": 0.05, "d": 6, "type": "floor"},
  {"id": "table", "x": 0, "y": 0, "z": 0, "w": 1.2, "h": 0.8, "d": 0.8, "type": "table"},
  {"id": "lamp", "x": 0, "y": 0.8, "z": 0, "w": 0.2, "h": 0.4, "d": 0.2, "type": "lamp"},
  {"id": "chair", "x": 1.2, "y": 0, "z": 0, "w": 0.5, "h": 0.9, "d": 0.5, "type": "chair"}
]})";

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, std::string_view text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(SPATIAL_TEST_TMP) / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    spit(dir_ / "room.json", kRoom);
  }

  fs::path file(const std::string& name) const { return dir_ / name; }

  Outcome run(const std::vector<std::string>& args, const std::string& env = "") const {
    std::string cmd = env.empty() ? "env -u SR_LOG_DIR " : "env " + env + " ";
    cmd += quoted(SPATIAL_REASONER_BIN);
    for (const auto& a : args) cmd += " " + quoted(a);
    cmd += " >" + quoted((dir_ / "stdout").string()) + " 2>" + quoted((dir_ / "stderr").string());
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(dir_ / "stdout");
    o.err = slurp(dir_ / "stderr");
    return o;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FilterExamplePrintsResultJson) {
  const auto r = run({"--facts", file("room.json").string(), "--pipeline", "filter(volume > 0.4) | log()"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("2 object", 0), 0u) << r.out;
  const std::string json = r.out.substr(r.out.find('{'));
  const auto doc = spatial::load_facts(json);
  ASSERT_EQ(doc.facts.size(), 2u);
  EXPECT_EQ(doc.facts.objects()[0].id, "floor");  // 6 * 0.05 * 6 = 1.8
  EXPECT_EQ(doc.facts.objects()[1].id, "table");  // 1.2 * 0.8 * 0.8 = 0.768
}

TEST_F(Cli, EmptyPipelineEchoesFacts) {
  const auto r = run({"--facts", file("room.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(spatial::load_facts(r.out).facts.size(), 4u);
}

TEST_F(Cli, FormatsAndPipelineFile) {
  spit(file("query.sr"), "filter(type == 'lamp' OR type == 'table')\n| select(ontop OR on)\n");
  const auto md = run({"--facts", file("room.json").string(), "--pipeline-file", file("query.sr").string(),
                       "--format", "mermaid"});
  ASSERT_EQ(md.code, 0) << md.err;
  EXPECT_EQ(md.out.rfind("```mermaid\ngraph LR\n", 0), 0u) << md.out;
  const auto obj = run({"--facts", file("room.json").string(), "--pipeline", "filter(type == 'chair')", "--format",
                        "scene"});
  ASSERT_EQ(obj.code, 0) << obj.err;
  EXPECT_NE(obj.out.find("o chair"), std::string::npos);
  EXPECT_EQ(run({"--facts", file("room.json").string(), "--format", "yaml"}).code, 1);
}

TEST_F(Cli, OutDirectoryReceivesStepFiles) {
  const auto r = run({"--facts", file("room.json").string(), "--pipeline",
                      "log() | filter(type == 'lamp') | log(base 3D) | log(ontop)", "--out", file("logs").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(file("logs") / "step01-summary.txt"));
  EXPECT_TRUE(fs::exists(file("logs") / "step03-base.json"));
  EXPECT_TRUE(fs::exists(file("logs") / "step03-scene.obj"));
  EXPECT_TRUE(fs::exists(file("logs") / "step04-mermaid.md"));
  EXPECT_TRUE(fs::exists(file("logs") / "result.json"));
  EXPECT_EQ(slurp(file("logs") / "result.json"), r.out);
  EXPECT_NE(slurp(file("logs") / "step04-mermaid.md").find("-->|ontop|"), std::string::npos);
}

TEST_F(Cli, LogDirectoryFromEnvironment) {
  const auto r = run({"--facts", file("room.json").string(), "--pipeline", "log()"},
                     "SR_LOG_DIR=" + quoted(file("envlogs").string()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(file("envlogs") / "step01-summary.txt"));
  const auto flag = run({"--facts", file("room.json").string(), "--pipeline", "log()", "--out",
                         file("flaglogs").string()},
                        "SR_LOG_DIR=" + quoted(file("envlogs2").string()));
  EXPECT_EQ(flag.code, 0);
  EXPECT_TRUE(fs::exists(file("flaglogs") / "step01-summary.txt"));
  EXPECT_FALSE(fs::exists(file("envlogs2")));
}

TEST_F(Cli, UnknownFlagPrintsUsage) {
  const auto r = run({"--facts", file("room.json").string(), "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--facts"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("--pipeline-file"), std::string::npos);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--facts", file("room.json").string(), "--pipeline", "log()", "--pipeline-file", "x"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, SyntaxErrorReportsLocation) {
  const auto r = run({"--facts", file("room.json").string(), "--pipeline", "filter(volume > 0.4)\n| pick(near"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("2:"), std::string::npos) << r.err;
  spit(file("bad.json"), "{\"objects\": [}");
  EXPECT_EQ(run({"--facts", file("bad.json").string()}).code, 1);
  spit(file("tax.txt"), "A subClassOf\n");
  const auto tax = run({"--facts", file("room.json").string(), "--taxonomy", file("tax.txt").string()});
  EXPECT_EQ(tax.code, 1);
  EXPECT_NE(tax.err.find("1:"), std::string::npos) << tax.err;
}

TEST_F(Cli, MissingFilesAreInputErrors) {
  const auto r = run({"--facts", file("nope.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.json"), std::string::npos);
  EXPECT_EQ(run({"--facts", file("room.json").string(), "--pipeline-file", file("nope.sr").string()}).code, 1);
}

TEST_F(Cli, RuntimeErrorsExitWithTwo) {
  const auto r = run({"--facts", file("room.json").string(), "--pipeline", "filter(volume > 0) | calc(v = ghost * 2)"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("step 2"), std::string::npos) << r.err;
  EXPECT_EQ(run({"--facts", file("room.json").string(), "--pipeline", "deduce(visibility)"}).code, 2);
}

TEST_F(Cli, TaxonomyDrivesIsa) {
  spit(file("tax.txt"), "Furniture\nTable subClassOf Furniture\nChair subClassOf Furniture\n");
  const auto r = run({"--facts", file("room.json").string(), "--taxonomy", file("tax.txt").string(), "--pipeline",
                      "isa(furniture)"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = spatial::load_facts(r.out);
  EXPECT_EQ(doc.facts.size(), 2u);
  EXPECT_TRUE(doc.facts.contains("table"));
  EXPECT_TRUE(doc.facts.contains("chair"));
}
