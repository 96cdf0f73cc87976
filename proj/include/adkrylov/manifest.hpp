#pragma once

/// \file manifest.hpp
/// \brief The Bai-group SuiteSparse matrices used by the benchmark.

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace adkrylov {

struct MatrixManifestEntry {
  int id;
  std::string_view name;
  std::string_view group;
  std::size_t rows;
  std::size_t cols;
  std::size_t nonzeros;
};

// SuiteSparse id, name, group, rows, cols, nonzeros.
inline constexpr std::array<MatrixManifestEntry, 65> kBaiManifest{{
  {292, "bfwa398", "Bai", 398, 398, 3678},
  {293, "bfwa62", "Bai", 62, 62, 450},
  {294, "bfwa782", "Bai", 782, 782, 7514},
  {298, "bwm200", "Bai", 200, 200, 796},
  {299, "bwm2000", "Bai", 2000, 2000, 7996},
  {300, "cdde1", "Bai", 961, 961, 4681},
  {301, "cdde2", "Bai", 961, 961, 4681},
  {302, "cdde3", "Bai", 961, 961, 4681},
  {303, "cdde4", "Bai", 961, 961, 4681},
  {304, "cdde5", "Bai", 961, 961, 4681},
  {305, "cdde6", "Bai", 961, 961, 4681},
  {306, "ck104", "Bai", 104, 104, 992},
  {307, "ck400", "Bai", 400, 400, 2860},
  {308, "ck656", "Bai", 656, 656, 3884},
  {309, "dw1024", "Bai", 2048, 2048, 10114},
  {310, "dw256A", "Bai", 512, 512, 2480},
  {311, "dw256B", "Bai", 512, 512, 2500},
  {312, "dw4096", "Bai", 8192, 8192, 41746},
  {313, "lop163", "Bai", 163, 163, 935},
  {314, "mhda416", "Bai", 416, 416, 8562},
  {316, "odepa400", "Bai", 400, 400, 1201},
  {318, "olm100", "Bai", 100, 100, 396},
  {319, "olm1000", "Bai", 1000, 1000, 3996},
  {320, "olm2000", "Bai", 2000, 2000, 7996},
  {321, "olm500", "Bai", 500, 500, 1996},
  {322, "olm5000", "Bai", 5000, 5000, 19996},
  {323, "pde225", "Bai", 225, 225, 1065},
  {324, "pde2961", "Bai", 2961, 2961, 14585},
  {325, "pde900", "Bai", 900, 900, 4380},
  {328, "qh882", "Bai", 882, 882, 3354},
  {329, "rbsa480", "Bai", 480, 480, 17088},
  {330, "rbsb480", "Bai", 480, 480, 17088},
  {331, "rdb2048", "Bai", 2048, 2048, 12032},
  {332, "rdb5000", "Bai", 5000, 5000, 29600},
  {333, "rdb968", "Bai", 968, 968, 5632},
  {334, "rw136", "Bai", 136, 136, 479},
  {335, "rw496", "Bai", 496, 496, 1859},
  {336, "rw5151", "Bai", 5151, 5151, 20199},
  {337, "tub100", "Bai", 100, 100, 396},
  {338, "tub1000", "Bai", 1000, 1000, 3996},
  {1612, "cryg10000", "Bai", 10000, 10000, 49699},
  {1613, "cryg2500", "Bai", 2500, 2500, 12349},
  {1614, "dw2048", "Bai", 2048, 2048, 10114},
  {1615, "dw8192", "Bai", 8192, 8192, 41746},
  {1616, "dwa512", "Bai", 512, 512, 2480},
  {1617, "dwb512", "Bai", 512, 512, 2500},
  {1620, "mhd1280a", "Bai", 1280, 1280, 47906},
  {1622, "mhd3200a", "Bai", 3200, 3200, 68026},
  {1624, "mhd4800a", "Bai", 4800, 4800, 102252},
  {1626, "qh1484", "Bai", 1484, 1484, 6110},
  {1627, "qh768", "Bai", 768, 768, 2934},
  {1628, "rdb1250", "Bai", 1250, 1250, 7300},
  {1629, "rdb1250l", "Bai", 1250, 1250, 7300},
  {1630, "rdb200", "Bai", 200, 200, 1120},
  {1631, "rdb200l", "Bai", 200, 200, 1120},
  {1632, "rdb2048_noL", "Bai", 2048, 2048, 12032},
  {1633, "rdb3200l", "Bai", 3200, 3200, 18880},
  {1634, "rdb450", "Bai", 450, 450, 2580},
  {1635, "rdb450l", "Bai", 450, 450, 2580},
  {1636, "rdb800l", "Bai", 800, 800, 4640},
  {1637, "tols1090", "Bai", 1090, 1090, 3546},
  {1638, "tols2000", "Bai", 2000, 2000, 5184},
  {1639, "tols340", "Bai", 340, 340, 2196},
  {1640, "tols4000", "Bai", 4000, 4000, 8784},
  {1641, "tols90", "Bai", 90, 90, 1746},
}};

/// Default size filter for benchmark runs.
inline constexpr std::size_t kDefaultMaxDim = 1000;

inline std::optional<MatrixManifestEntry> find_manifest_entry(std::string_view name) {
  for (const auto& e : kBaiManifest)
    if (e.name == name) return e;
  return std::nullopt;
}

/// Entries with rows and cols <= max_dim; max_dim = 0 keeps everything.
inline std::vector<MatrixManifestEntry> manifest_subset(std::size_t max_dim) {
  std::vector<MatrixManifestEntry> out;
  for (const auto& e : kBaiManifest)
    if (max_dim == 0 || (e.rows <= max_dim && e.cols <= max_dim)) out.push_back(e);
  return out;
}

}  // namespace adkrylov
