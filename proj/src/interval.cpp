#include "mems/interval.hpp"

#include <iomanip>
#include <ostream>

namespace mems {

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << '[' << x.lo() << ", " << x.hi() << ']';
  os.flags(flags);
  os.precision(prec);
  return os;
}

}  // namespace mems
