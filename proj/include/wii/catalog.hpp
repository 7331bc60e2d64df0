#pragma once

#include <string>
#include <vector>

#include "wii/labels.hpp"

namespace wii {

enum class Scheme {
  kGfsk,         // Gaussian FSK (802.15.1)
  kDbpskBarker,  // 802.11b 1 Mb/s DSSS, Barker-11 spreading
  kDqpskBarker,  // 802.11b 2 Mb/s DSSS, Barker-11 spreading
  kCck5_5,       // 802.11b 5.5 Mb/s complementary code keying
  kCck11,        // 802.11b/g 11 Mb/s CCK chip waveform
  kOqpskDsss,    // 802.15.4 O-QPSK with 32-chip DSSS, half-sine chips
};

const char* scheme_name(Scheme s);

struct ModulationVariant {
  std::string name;
  Scheme scheme;
  double symbol_rate_hz;   // modulation symbols per second
  double chip_rate_hz;     // 0 when the scheme has no spreading
  double gauss_bt;         // Gaussian bandwidth-time product (GFSK only)
  double mod_index;        // frequency modulation index (GFSK only)
  double payload_mbps;     // nominal payload rate carried in metadata
};

struct ClassSpec {
  int class_id;
  Technology technology;
  double center_offset_hz;        // relative to the sub-band center
  double occupied_bandwidth_hz;
  std::vector<ModulationVariant> variants;
};

// The fixed 15-class catalog for one 10 MHz sensing sub-band:
//   classes 0-9   IEEE 802.15.1, 1 MHz raster at -4.5 ... +4.5 MHz
//   classes 10-12 IEEE 802.11 b/g, 5 MHz raster at -5, 0, +5 MHz (22 MHz
//                 occupied, so only partially inside the sub-band)
//   classes 13-14 IEEE 802.15.4, 5 MHz raster at -2.5, +2.5 MHz
//
// The variant lists total 19 distinct entries. The exact mix is a
// reconstruction from the standards rather than a recorded fact: the
// 802.11 b/g list is the 14-rate ladder (1, 2, 5.5, 6, 9, 11, 12, 18, 22,
// 24, 33, 36, 48, 54 Mb/s) with the ERP/PBCC rates represented by the
// CCK-11 chip waveform, 802.15.1 carries four GFSK variants spanning the
// allowed modulation-index range 0.28-0.35, and 802.15.4 has its single
// 2.4 GHz O-QPSK PHY.
const std::vector<ClassSpec>& class_catalog();

const ClassSpec& class_spec(int class_id);

// Variant lookup within a class; throws when the pairing is unknown.
const ModulationVariant& find_variant(int class_id, const std::string& name);

// Number of distinct variant names across the whole catalog.
int distinct_variant_count();

}  // namespace wii
