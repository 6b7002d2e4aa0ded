// Regenerates the bundled data files under data/. Run from the repo root:
//   ./build/tools/pestpulse_gen_sample data

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pestpulse/sample_data.hpp"

namespace fs = std::filesystem;

namespace {

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    std::cerr << "failed to write " << path << "\n";
    std::exit(1);
  }
  std::cout << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("data");
  fs::create_directories(dir / "fixtures");

  pestpulse::sampledata::CorpusSpec spec;
  write(dir / "sample_kcc.csv", pestpulse::sampledata::kcc_csv(spec));
  write(dir / "sample_gca.csv", pestpulse::sampledata::area_csv());
  write(dir / "pest_lexicon.json", pestpulse::sampledata::lexicon_json());
  write(dir / "fixtures" / "random_walk_series.csv",
        pestpulse::sampledata::random_walk_series_csv(20240117, 240));
  return 0;
}
