#pragma once

#include <cstdint>
#include <string>

#include "wii/catalog.hpp"
#include "wii/snapshot.hpp"

namespace wii {

// Synthesizes 128 samples of a continuously transmitting burst of the given
// class: random payload bits drawn from the seed, modulated per scheme,
// shifted to the class center offset, random initial carrier phase and
// symbol-clock offset, unit mean power. Deterministic for a fixed
// (class_id, variant, seed) triple.
//
// Wide-band signals are generated at an 11x internal rate, shifted, then
// band-limited to the 10 MHz sensing sub-band and decimated, so 802.11
// channels appear only with their in-band slice.
Iq128 synthesize_burst(int class_id, const ModulationVariant& variant,
                       std::uint64_t seed);

// Looks the variant up in the class spec first; unknown pairings are
// rejected with a diagnostic.
Iq128 synthesize_burst(int class_id, const std::string& variant_name,
                       std::uint64_t seed);

}  // namespace wii
