// Regenerates the golden UXML/USS/manifest outputs for every calibrated
// fixture scaffold. Run after an intended change to the emitters, then
// review the diff and commit:
//
//   gen_goldens <fixtures/scaffolds dir> <fixtures/golden dir>

#include <filesystem>
#include <iostream>
#include <vector>

#include "sprite/scaffold_io.hpp"
#include "sprite/synthesis.hpp"
#include "sprite/util.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: gen_goldens <scaffold dir> <golden dir>\n";
    return 2;
  }
  const fs::path scaffold_dir(argv[1]);
  const fs::path golden_dir(argv[2]);

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(scaffold_dir)) {
    if (entry.path().extension() == ".yaml") inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());

  int written = 0;
  for (const fs::path& input : inputs) {
    const sprite::Scaffold scaffold = sprite::load_scaffold_file(input.string());
    if (scaffold.phase != sprite::Phase::Calibrated) continue;
    const std::string name = input.stem().string();
    const sprite::CompiledUI compiled = sprite::compile(scaffold, name);
    const fs::path out = golden_dir / name;
    fs::create_directories(out);
    sprite::write_file_atomic(out / (name + ".uxml"), compiled.uxml_text);
    sprite::write_file_atomic(out / (name + ".uss"), compiled.uss_text);
    sprite::write_file_atomic(out / "manifest.json",
                              sprite::asset_manifest_json(compiled.asset_manifest) + "\n");
    std::cout << "golden: " << name << "\n";
    ++written;
  }
  if (written == 0) {
    std::cerr << "no calibrated fixtures found in " << scaffold_dir << "\n";
    return 1;
  }
  return 0;
}
