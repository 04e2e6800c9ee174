#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "shillguard/dataset.hpp"
#include "shillguard/error.hpp"
#include "shillguard/synthdata.hpp"

// Writes a MovieLens-100K-shaped rating log for demos and benchmarks.
int main(int argc, char** argv) {
  CLI::App app{"shillguard-synth - fabricate a MovieLens-100K-shaped rating log"};
  std::uint64_t seed = 1;
  std::string out = "u.synth.data";
  app.add_option("--seed", seed, "Generator seed")->default_val(1);
  app.add_option("--out", out, "Output TSV path")->default_val("u.synth.data");

  try {
    app.parse(argc, argv);
    const auto ds = shillguard::synthetic_movielens(seed);
    shillguard::write_ratings_file(out, ds);
    std::cout << "ratings=" << ds.size() << "\nusers=" << ds.users.size()
              << "\nitems=" << ds.items.size() << "\nout=" << out << '\n';
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "shillguard-synth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
