#include "epde/bdf.hpp"

namespace epde {

BdfScheme bdf_coefficients(int k) {
  if (k < 1 || k > 5)
    throw ValidationError("bdf order k must be in 1..5, got " +
                          std::to_string(k));
  BdfScheme s;
  s.k = k;
  s.b.resize(k);
  switch (k) {
    case 1:
      s.alpha_k = 1.0;
      s.b << 1.0;
      s.tau = 0.0;
      break;
    case 2:
      s.alpha_k = 3.0 / 2.0;
      s.b << 2.0, -1.0 / 2.0;
      s.tau = 0.0;
      break;
    case 3:
      s.alpha_k = 11.0 / 6.0;
      s.b << 3.0, -3.0 / 2.0, 1.0 / 3.0;
      s.tau = 0.0836;
      break;
    case 4:
      s.alpha_k = 25.0 / 12.0;
      s.b << 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0;
      s.tau = 0.2878;
      break;
    case 5:
      s.alpha_k = 137.0 / 60.0;
      s.b << 5.0, -5.0, 10.0 / 3.0, -5.0 / 4.0, 1.0 / 5.0;
      s.tau = 0.8160;
      break;
  }
  return s;
}

}  // namespace epde
