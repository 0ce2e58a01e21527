// whfemd command-line tool. Subcommands are wired up as their modules land.
#include <CLI11.hpp>

#include "whfemd/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"whfemd: spectral feature enhancement toolkit"};
  app.set_version_flag("--version", whfemd::kVersion);
  CLI11_PARSE(app, argc, argv);
  return 0;
}
