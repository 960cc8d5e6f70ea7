#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spatial/io.hpp"
#include "spatial/pipeline.hpp"
#include "spatial/taxonomy.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kRuntimeError = 2;

struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputFailure(std::string("cannot open ") + what + " file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string extension_of(spatial::LogArtifact::Kind kind) {
  switch (kind) {
    case spatial::LogArtifact::Kind::summary: return "txt";
    case spatial::LogArtifact::Kind::base: return "json";
    case spatial::LogArtifact::Kind::mermaid: return "md";
    case spatial::LogArtifact::Kind::scene: return "obj";
  }
  return "txt";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

// Result objects plus the relations among them.
spatial::FactBase restrict_to(const spatial::FactBase& fb, const std::vector<std::string>& ids) {
  spatial::FactBase out;
  for (const auto& id : ids) {
    if (const auto* obj = fb.find(id)) out.upsert(*obj);
  }
  std::vector<spatial::SpatialRelation> kept;
  for (const auto& r : fb.relations()) {
    if (out.contains(r.subject) && out.contains(r.object)) kept.push_back(r);
  }
  out.replace_categories(fb.deduced_categories(), std::move(kept));
  out.variables() = fb.variables();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial reasoning over oriented bounding boxes", "spatial-reasoner"};
  std::string facts_path;
  std::string taxonomy_path;
  std::string pipeline_text;
  std::string pipeline_path;
  std::string out_dir;
  std::string format = "json";

  app.add_option("--facts", facts_path, "Fact document (JSON)")->required();
  app.add_option("--taxonomy", taxonomy_path, "Class taxonomy (RDF/XML or line format)");
  auto* inline_opt = app.add_option("--pipeline", pipeline_text, "Pipeline text");
  auto* file_opt = app.add_option("--pipeline-file", pipeline_path, "File holding the pipeline text");
  inline_opt->excludes(file_opt);
  app.add_option("--out", out_dir, "Directory for log artifacts (default: $SR_LOG_DIR)");
  app.add_option("--format", format, "Format of the final result")
      ->check(CLI::IsMember({"json", "mermaid", "scene"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }
  if (out_dir.empty()) {
    if (const char* env = std::getenv("SR_LOG_DIR"); env != nullptr) out_dir = env;
  }

  spatial::FactDocument doc;
  spatial::PipelineProgram program;
  spatial::Taxonomy taxonomy;
  try {
    doc = spatial::load_facts(read_file(facts_path, "facts"));
    if (!taxonomy_path.empty()) {
      const std::string text = read_file(taxonomy_path, "taxonomy");
      taxonomy = spatial::load_taxonomy(text, spatial::detect_taxonomy_format(text));
    }
    if (!pipeline_path.empty()) pipeline_text = read_file(pipeline_path, "pipeline");
    program = spatial::parse_pipeline(pipeline_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    spatial::EvaluationOptions options;
    if (!taxonomy_path.empty()) options.taxonomy = &taxonomy;
    const auto settings = doc.settings.value_or(spatial::AdjustmentSettings{});
    const auto ctx = spatial::evaluate(program, doc.facts, settings, options);

    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (const auto& log : ctx.logs) {
      if (out_dir.empty()) {
        std::cout << log.content;
        continue;
      }
      char name[32];
      std::snprintf(name, sizeof name, "step%02zu-", log.step);
      write_file(fs::path(out_dir) / (name + std::string(spatial::to_string(log.kind)) + "." + extension_of(log.kind)),
                 log.content);
    }

    const auto result = restrict_to(ctx.facts, ctx.result());
    std::string rendered;
    if (format == "mermaid") rendered = spatial::export_mermaid(result);
    else if (format == "scene") rendered = spatial::export_scene(result);
    else rendered = spatial::dump_facts(result, ctx.settings, true);
    std::cout << rendered;
    if (!out_dir.empty()) {
      const char* ext = format == "mermaid" ? "md" : format == "scene" ? "obj" : "json";
      write_file(fs::path(out_dir) / (std::string("result.") + ext), rendered);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
