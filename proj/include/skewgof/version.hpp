#pragma once

namespace skewgof {

inline constexpr const char* version_string = "skewgof 0.1.0";

// Identifier of the pseudo-random generator family; embedded in every
// report so results can be tied to the exact stream implementation.
inline constexpr const char* generator_id = "xoshiro256++";

}  // namespace skewgof
