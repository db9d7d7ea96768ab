// Regenerates the committed golden fixture files under tests/data/. Run
// manually after a deliberate format change:
//
//   ./build/tests/ras_make_fixtures tests/data
//
// then refresh the frozen hashes in test_fixtures.cpp.

#include <cstdio>

#include "fixture_recipes.hpp"
#include "ras/wire.hpp"

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "tests/data";
  for (const auto& fx : fixtures::all()) {
    const auto built = fixtures::build(fx);
    ras::wire::write_file(dir + "/" + fx.container_name, built.container);
    std::printf("%-28s %6zu bytes  fnv64 %llu\n", fx.container_name.c_str(), built.container.size(),
                (unsigned long long)fixtures::fnv64(built.container));
    if (!built.table_file.empty()) {
      ras::wire::write_file(dir + "/" + fx.table_name, built.table_file);
      std::printf("%-28s %6zu bytes  fnv64 %llu\n", fx.table_name.c_str(), built.table_file.size(),
                  (unsigned long long)fixtures::fnv64(built.table_file));
    }
  }
  return 0;
}
