// Regenerates the bundled trace fixtures under data/.
#include <filesystem>
#include <iostream>

#include "fixtures.hpp"

int main(int argc, char** argv) {
  std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  try {
    hisim::write_trace(hisim::fixtures::cifar_fixture(), dir / "cifar_fixture.jsonl", hisim::TraceFormat::jsonl);
    hisim::write_trace(hisim::fixtures::dog_fixture(), dir / "dog_fixture.jsonl", hisim::TraceFormat::jsonl);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << '\n';
    return 1;
  }
  std::cout << "wrote fixtures to " << dir.string() << '\n';
  return 0;
}
