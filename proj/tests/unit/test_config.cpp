#include <gtest/gtest.h>

#include "intent_eval/config.hpp"
#include "support/temp_dir.hpp"

using namespace intent_eval;

namespace {

std::string config_error_message(std::string_view toml) {
  try {
    run_config_from_toml(toml, "/base");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "ConfigError");
    return e.what();
  }
  return "";
}

std::string toml_error(std::string_view toml) {
  try {
    parse_toml(toml);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "ConfigError");
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Toml, ScalarsArraysComments) {
  const auto t = parse_toml(
      "# leading comment\n"
      "name = \"fixture\"   # trailing\n"
      "raw = 'C:\\path'\n"
      "n = 1_000\n"
      "neg = -3\n"
      "x = 2.5e-1\n"
      "flag = true\n"
      "list = [0.3, 0.5, 1]\n"
      "words = [\"a\", 'b']\n"
      "\r\n"
      "[section]\n"
      "inner = \"v\\t\\\"q\\\"\"\n");
  EXPECT_EQ(std::get<std::string>(t.at("name").value), "fixture");
  EXPECT_EQ(std::get<std::string>(t.at("raw").value), "C:\\path");
  EXPECT_EQ(std::get<std::int64_t>(t.at("n").value), 1000);
  EXPECT_EQ(std::get<std::int64_t>(t.at("neg").value), -3);
  EXPECT_EQ(t.at("x").as_double(), 0.25);
  EXPECT_EQ(std::get<bool>(t.at("flag").value), true);
  const auto& list = std::get<TomlArray>(t.at("list").value);
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[2].as_double(), 1.0);
  EXPECT_EQ(std::get<TomlArray>(t.at("words").value).size(), 2u);
  EXPECT_EQ(std::get<std::string>(t.at("section.inner").value), "v\t\"q\"");
}

TEST(Toml, ErrorsCarryLineNumbers) {
  EXPECT_NE(toml_error("a = 1\nb 2\n").find("config line 2"), std::string::npos);
  EXPECT_NE(toml_error("a = \"open\n").find("unterminated string"), std::string::npos);
  EXPECT_NE(toml_error("a = 1\na = 2\n").find("duplicate key"), std::string::npos);
  EXPECT_NE(toml_error("\n\n\nx = [1, 2\n").find("config line 4"), std::string::npos);
  EXPECT_NE(toml_error("x = nope\n").find("cannot parse value"), std::string::npos);
  EXPECT_NE(toml_error("x = 1 2\n").find("trailing"), std::string::npos);
  EXPECT_NE(toml_error("x =\n").find("missing value"), std::string::npos);
  EXPECT_NE(toml_error("x = \"\\q\"\n").find("unsupported escape"), std::string::npos);
}

TEST(RunConfigTest, DefaultsAndPathResolution) {
  const auto c = run_config_from_toml(
      "documents = \"data/docs.jsonl\"\n"
      "phrases = \"/abs/phrases.jsonl\"\n"
      "summaries = \"sums.jsonl\"\n",
      "/base");
  EXPECT_EQ(c.documents, "/base/data/docs.jsonl");
  EXPECT_EQ(c.phrases, "/abs/phrases.jsonl");
  EXPECT_EQ(c.summaries, "/base/sums.jsonl");
  EXPECT_EQ(c.output_dir, "/base/out");
  EXPECT_EQ(c.dataset, "docs");
  EXPECT_EQ(c.metrics, (std::set<std::string>{"bleu", "intent", "meteor", "rouge_l"}));
  EXPECT_TRUE(c.ratios.empty());
  EXPECT_EQ(c.solver, SolverChoice::exact);
  EXPECT_EQ(c.missing_tokens, MissingTokenPolicy::error);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_FALSE(c.embeddings);
}

TEST(RunConfigTest, EmbeddingsEnableSemanticMetricsByDefault) {
  const auto c = run_config_from_toml(
      "documents = \"d.jsonl\"\nsummaries = \"s.jsonl\"\nembeddings = \"e.tsv\"\n"
      "solver = \"sinkhorn\"\nmissing_tokens = \"skip\"\nseed = 11\nratios = [0.3]\n",
      "/base");
  EXPECT_EQ(c.metrics.size(), 6u);
  EXPECT_EQ(c.solver, SolverChoice::sinkhorn);
  EXPECT_EQ(c.missing_tokens, MissingTokenPolicy::skip);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.ratios, std::vector<double>{0.3});
}

TEST(RunConfigTest, ValidationFailures) {
  const std::string base = "documents = \"d.jsonl\"\nsummaries = \"s.jsonl\"\n";
  EXPECT_NE(config_error_message("summaries = \"s\"\n").find("\"documents\" is required"), std::string::npos);
  EXPECT_NE(config_error_message("documents = \"d\"\n").find("\"summaries\" is required"), std::string::npos);
  EXPECT_NE(config_error_message(base + "metrics = []\n").find("at least one metric"), std::string::npos);
  EXPECT_NE(config_error_message(base + "metrics = [\"rouge_2\"]\n").find("unknown metric"), std::string::npos);
  EXPECT_NE(config_error_message(base + "metrics = [\"bert_score\"]\n").find("need an \"embeddings\""),
            std::string::npos);
  EXPECT_NE(config_error_message(base + "metrics = [\"bleu\"]\nembeddings = \"e.tsv\"\n").find("no semantic metric"),
            std::string::npos);
  EXPECT_NE(config_error_message(base + "ratios = [0.0]\n").find("(0, 1]"), std::string::npos);
  EXPECT_NE(config_error_message(base + "ratios = [1.5]\n").find("(0, 1]"), std::string::npos);
  EXPECT_NE(config_error_message(base + "solver = \"simplex\"\n").find("solver must be"), std::string::npos);
  EXPECT_NE(config_error_message(base + "missing_tokens = \"drop\"\n").find("missing_tokens must be"),
            std::string::npos);
  EXPECT_NE(config_error_message(base + "seed = -1\n").find("non-negative"), std::string::npos);
  EXPECT_NE(config_error_message(base + "colour = \"red\"\n").find("unknown key"), std::string::npos);
  EXPECT_NE(config_error_message(base + "metrics = \"bleu\"\n").find("array of strings"), std::string::npos);
  EXPECT_NE(config_error_message("documents = 3\nsummaries = \"s\"\n").find("must be a string"), std::string::npos);
}

TEST(RunConfigTest, LoadFromFileResolvesAgainstItsDirectory) {
  test_support::TempDir dir;
  const auto path = dir.write("run.toml", "documents = \"d.jsonl\"\nsummaries = \"s.jsonl\"\noutput_dir = \"res\"\n");
  const auto c = load_run_config(path);
  EXPECT_EQ(c.documents, (dir.path() / "d.jsonl").lexically_normal().string());
  EXPECT_EQ(c.output_dir, (dir.path() / "res").lexically_normal().string());

  try {
    load_run_config((dir.path() / "absent.toml").string());
    FAIL() << "expected IoError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "IoError");
  }
}

TEST(RunConfigTest, FixtureConfigLoads) {
  const auto c = load_run_config(std::string(FIXTURE_DIR) + "/config.toml");
  EXPECT_EQ(c.dataset, "fixture");
  EXPECT_EQ(c.metrics.size(), 6u);
  EXPECT_EQ(c.ratios, (std::vector<double>{0.3, 0.5}));
  EXPECT_EQ(c.seed, 7u);
  ASSERT_TRUE(c.embeddings);
}
