#include "polorient/labels.h"

#include "polorient/errors.h"

namespace polorient {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kAap: return "AAP";
    case Label::kBjp: return "BJP";
    case Label::kCantSay: return "CANT_SAY";
    case Label::kCong: return "CONG";
  }
  return "CANT_SAY";
}

std::optional<Label> parse_label(std::string_view text) {
  for (Label label : kAllLabels) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

Label parse_label_or_throw(std::string_view text) {
  if (auto label = parse_label(text)) return *label;
  throw DataError("unknown label '" + std::string(text) +
                  "' (expected AAP, BJP, CONG or CANT_SAY)");
}

}  // namespace polorient
