#include "falcon/fuzzy.hpp"

#include <cctype>

namespace falcon {

std::string_view to_string(TNorm t) {
  switch (t) {
    case TNorm::Goedel: return "goedel";
    case TNorm::Product: return "product";
    case TNorm::Lukasiewicz: return "lukasiewicz";
  }
  return "?";
}

TNorm parse_tnorm(std::string_view s) {
  std::string lower;
  for (char ch : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "goedel" || lower == "godel" || lower == "minimum") return TNorm::Goedel;
  if (lower == "product") return TNorm::Product;
  if (lower == "lukasiewicz") return TNorm::Lukasiewicz;
  throw std::invalid_argument("unknown t-norm '" + std::string(s) + "'");
}

}  // namespace falcon
