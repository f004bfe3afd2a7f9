#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace polorient {

// Party labels in lexicographic order of their names; the enum order is the
// tie-break order used throughout.
enum class Label { kAap = 0, kBjp = 1, kCantSay = 2, kCong = 3 };

inline constexpr std::array<Label, 4> kAllLabels = {Label::kAap, Label::kBjp,
                                                    Label::kCantSay, Label::kCong};
inline constexpr std::array<Label, 3> kParties = {Label::kAap, Label::kBjp,
                                                  Label::kCong};

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);
// Throws DataError on unknown spellings.
Label parse_label_or_throw(std::string_view text);

inline bool is_party(Label label) { return label != Label::kCantSay; }

}  // namespace polorient
