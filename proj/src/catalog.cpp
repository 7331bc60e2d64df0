#include "wii/catalog.hpp"

#include <set>
#include <stdexcept>

namespace wii {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kGfsk: return "gfsk";
    case Scheme::kDbpskBarker: return "dbpsk-barker";
    case Scheme::kDqpskBarker: return "dqpsk-barker";
    case Scheme::kCck5_5: return "cck-5.5";
    case Scheme::kCck11: return "cck-11";
    case Scheme::kOqpskDsss: return "oqpsk-dsss";
  }
  return "?";
}

namespace {

ModulationVariant gfsk_variant(const std::string& name, double mod_index) {
  return {name, Scheme::kGfsk, 1e6, 0.0, 0.5, mod_index, 1.0};
}

ModulationVariant dsss_variant(const std::string& name, Scheme scheme,
                               double symbol_rate, double payload_mbps) {
  return {name, scheme, symbol_rate, 11e6, 0.0, 0.0, payload_mbps};
}

std::vector<ModulationVariant> bt_variants() {
  // Bluetooth BR allows a modulation index anywhere in [0.28, 0.35]; four
  // index points model transmitter spread. All 1 Msym/s, BT = 0.5.
  return {
      gfsk_variant("gfsk-h028", 0.28),
      gfsk_variant("gfsk-h030", 0.30),
      gfsk_variant("gfsk-h032", 0.32),
      gfsk_variant("gfsk-h035", 0.35),
  };
}

std::vector<ModulationVariant> wlan_variants() {
  // Full 802.11 b/g rate ladder. Rates above 11 Mb/s (ERP-OFDM and the
  // optional PBCC modes) are represented by the CCK-11 chip waveform; the
  // payload rate is kept as metadata.
  std::vector<ModulationVariant> v;
  v.push_back(dsss_variant("dsss-1", Scheme::kDbpskBarker, 1e6, 1.0));
  v.push_back(dsss_variant("dsss-2", Scheme::kDqpskBarker, 1e6, 2.0));
  v.push_back(dsss_variant("cck-5.5", Scheme::kCck5_5, 1.375e6, 5.5));
  v.push_back(dsss_variant("cck-11", Scheme::kCck11, 1.375e6, 11.0));
  v.push_back(dsss_variant("erp-6", Scheme::kCck11, 1.375e6, 6.0));
  v.push_back(dsss_variant("erp-9", Scheme::kCck11, 1.375e6, 9.0));
  v.push_back(dsss_variant("erp-12", Scheme::kCck11, 1.375e6, 12.0));
  v.push_back(dsss_variant("erp-18", Scheme::kCck11, 1.375e6, 18.0));
  v.push_back(dsss_variant("pbcc-22", Scheme::kCck11, 1.375e6, 22.0));
  v.push_back(dsss_variant("erp-24", Scheme::kCck11, 1.375e6, 24.0));
  v.push_back(dsss_variant("pbcc-33", Scheme::kCck11, 1.375e6, 33.0));
  v.push_back(dsss_variant("erp-36", Scheme::kCck11, 1.375e6, 36.0));
  v.push_back(dsss_variant("erp-48", Scheme::kCck11, 1.375e6, 48.0));
  v.push_back(dsss_variant("erp-54", Scheme::kCck11, 1.375e6, 54.0));
  return v;
}

std::vector<ModulationVariant> zb_variants() {
  // The single 2.4 GHz 802.15.4 PHY: 250 kb/s O-QPSK, 32-chip DSSS at
  // 2 Mchip/s, half-sine chip shaping. 62.5 ksym/s (4 bits per symbol).
  return {{"oqpsk-250", Scheme::kOqpskDsss, 62.5e3, 2e6, 0.0, 0.0, 0.25}};
}

std::vector<ClassSpec> build_catalog() {
  std::vector<ClassSpec> specs;
  specs.reserve(kNumClasses);
  const auto bt = bt_variants();
  for (int k = 0; k < 10; ++k) {
    specs.push_back({k, Technology::kBt15_1, (-4.5 + k) * 1e6, 1e6, bt});
  }
  const auto wlan = wlan_variants();
  for (int k = 0; k < 3; ++k) {
    specs.push_back({10 + k, Technology::kWlan11bg, (-5.0 + 5.0 * k) * 1e6, 22e6, wlan});
  }
  const auto zb = zb_variants();
  specs.push_back({13, Technology::kZb15_4, -2.5e6, 2e6, zb});
  specs.push_back({14, Technology::kZb15_4, 2.5e6, 2e6, zb});
  return specs;
}

}  // namespace

const std::vector<ClassSpec>& class_catalog() {
  static const std::vector<ClassSpec> catalog = build_catalog();
  return catalog;
}

const ClassSpec& class_spec(int class_id) {
  if (class_id < 0 || class_id >= kNumClasses)
    throw std::invalid_argument("class id out of range: " + std::to_string(class_id));
  return class_catalog()[static_cast<std::size_t>(class_id)];
}

const ModulationVariant& find_variant(int class_id, const std::string& name) {
  const ClassSpec& spec = class_spec(class_id);
  for (const auto& v : spec.variants)
    if (v.name == name) return v;
  throw std::invalid_argument("class " + std::to_string(class_id) +
                              " has no variant named '" + name + "'");
}

int distinct_variant_count() {
  std::set<std::string> names;
  for (const auto& spec : class_catalog())
    for (const auto& v : spec.variants) names.insert(v.name);
  return static_cast<int>(names.size());
}

}  // namespace wii
