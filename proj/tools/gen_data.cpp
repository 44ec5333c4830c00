// Writes the built-in benchmark graphs as edge list files.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpaug/graph.hpp"
#include "lpaug/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the built-in benchmark graphs as edge list files"};
  std::vector<std::string> names;
  std::string out_dir = ".";
  bool all = false;
  app.add_option("names", names, "datasets to write: cele, usair, yeast, router");
  app.add_flag("--all", all, "write every built-in dataset");
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (all) names = {"cele", "usair", "yeast", "router"};
    if (names.empty()) throw std::runtime_error("no datasets requested; pass names or --all");
    std::filesystem::create_directories(out_dir);
    for (const std::string& name : names) {
      lpaug::Graph g = lpaug::standin_dataset(name);
      std::string path = out_dir + "/" + name + ".txt";
      lpaug::save_edge_list(g, path);
      std::cout << name << ": nodes=" << g.num_nodes() << " edges=" << g.num_edges() << " -> "
                << path << "\n";
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
