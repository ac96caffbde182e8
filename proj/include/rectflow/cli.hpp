#pragma once
#include <ostream>
namespace rectflow::cli {
inline int run(int, char**, std::ostream&, std::ostream& err) { err << "not implemented\n"; return 2; }
}
