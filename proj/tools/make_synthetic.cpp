// Writes the built-in synthetic corpus as groups JSON Lines.
#include <fstream>
#include <iostream>
#include <span>

#include "copycat/corpus.hpp"
#include "copycat/synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_synthetic OUT.jsonl\n";
    return 2;
  }
  std::ofstream out(argv[1]);
  if (!out) {
    std::cerr << "cannot write " << argv[1] << '\n';
    return 1;
  }
  const copycat::SyntheticCorpus corpus = copycat::make_synthetic_corpus();
  copycat::write_groups_jsonl(out, std::span<const copycat::ReviewGroup>(corpus.groups));
  return 0;
}
