// Dump the lemma list of the mlmorph analyser (mlmorph/data/malayalam.a).
//
// Walks the SFST transducer from the root, following only arcs whose
// analysis-side symbol is a Malayalam character, and stops at the first
// tag symbol (<n>, <v>, ...). Prints "lemma<TAB>tag" lines.
//
// Build against the SFST sources (pip download --no-binary :all: sfst):
//   g++ -O2 -I$SFST/src dump_mlmorph_lemmas.cpp $SFST/src/{fst,alphabet,basic,utf8,
//       operators,determinise,hopcroft,generate}.cpp -o dump_mlmorph_lemmas
//   ./dump_mlmorph_lemmas .../mlmorph/data/malayalam.a > lemmas.tsv

#include "fst.h"

#include <cstdio>
#include <iostream>
#include <set>
#include <string>

using namespace SFST;

static std::set<std::string> lemmas;
static Transducer *fst;
static const int MAX_DEPTH = 30;

static bool is_malayalam(const std::string &s) {
  // U+0D00..U+0D7F encode as E0 B4 xx / E0 B5 xx
  if (s.size() == 3 && (unsigned char)s[0] == 0xE0 &&
      ((unsigned char)s[1] == 0xB4 || (unsigned char)s[1] == 0xB5))
    return true;
  return s == "\xE2\x80\x8D" || s == "\xE2\x80\x8C"; // ZWJ, ZWNJ
}

static void walk(Node *node, const std::string &prefix, int depth) {
  if (depth > MAX_DEPTH)
    return;
  for (ArcsIter it(node->arcs()); it; it++) {
    Arc *arc = it;
    // the analysis side of mlmorph is the lower level
    Character c = arc->label().lower_char();
    std::string sym = c ? fst->alphabet.code2symbol(c) : std::string();
    if (c && sym.size() > 2 && sym[0] == '<') {
      if (!prefix.empty())
        lemmas.insert(prefix + "\t" + sym);
      continue;
    }
    if (c && !is_malayalam(sym))
      continue;
    walk(arc->target_node(), prefix + sym, depth + 1);
  }
}

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " malayalam.a\n";
    return 1;
  }
  FILE *f = fopen(argv[1], "rb");
  if (!f) {
    perror(argv[1]);
    return 1;
  }
  fst = new Transducer(f);
  walk(fst->root_node(), "", 0);
  for (const auto &l : lemmas)
    std::cout << l << "\n";
  return 0;
}
