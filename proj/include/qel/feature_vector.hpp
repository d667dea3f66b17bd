#pragma once

#include <array>
#include <cstddef>

namespace qel {

inline constexpr std::size_t kFeatureCount = 18;

// Dense candidate feature vector. Index layout:
//   0 in_query    1 is_pt      2 is_cm      3 len        4 w(a,e)
//   5 sc(a,e)     6 lp(a)      7 pr(e|a)    8 cm_sc      9 cm_fs
//  10 cm_dd      11 embed_sc  12 embed_fs  13 embed_dd  14 rel_cd_sc
//  15 rel_cd_sp  16 rel_re_sc 17 rel_re_sp
using FeatureVector = std::array<double, kFeatureCount>;

inline const char* feature_name(std::size_t i) {
  static const char* names[kFeatureCount] = {
      "in_query",  "is_pt",      "is_cm",      "len",       "w",
      "sc",        "lp",         "pr",         "cm_sc",     "cm_fs",
      "cm_dd",     "embed_sc",   "embed_fs",   "embed_dd",  "rel_cd_sc",
      "rel_cd_sp", "rel_re_sc",  "rel_re_sp"};
  return names[i];
}

}  // namespace qel
