// dccrn/base.hpp

// Copyright 2026  DCCRN-CPP Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DCCRN_BASE_HPP_
#define DCCRN_BASE_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dccrn {

// All argument/shape violations surface as std::invalid_argument, runtime
// conditions (corrupt files, non-finite values) as std::runtime_error.
#define DCCRN_CHECK(cond, msg)                                   \
  do {                                                           \
    if (!(cond)) {                                               \
      std::ostringstream os__;                                   \
      os__ << "check failed: " << msg;                           \
      throw std::invalid_argument(os__.str());                   \
    }                                                            \
  } while (0)

#define DCCRN_RUNTIME_CHECK(cond, msg)                           \
  do {                                                           \
    if (!(cond)) {                                               \
      std::ostringstream os__;                                   \
      os__ << msg;                                               \
      throw std::runtime_error(os__.str());                      \
    }                                                            \
  } while (0)

template <typename T>
inline bool all_finite(const T* p, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

template <typename T>
inline bool all_finite(const std::vector<T>& v) {
  return all_finite(v.data(), v.size());
}

// FNV-1a, used to fingerprint the effective config inside checkpoints.
inline uint64_t fnv1a64(const void* data, size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// Scalar I/O for the checkpoint and WAV formats, both little-endian on the
// wire. Assumes a little-endian host.
namespace le {

template <typename T>
inline void write(std::string* out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

template <typename T>
inline bool read(const std::string& in, size_t* pos, T* v) {
  if (*pos + sizeof(T) > in.size()) return false;
  std::memcpy(v, in.data() + *pos, sizeof(T));
  *pos += sizeof(T);
  return true;
}

}  // namespace le

}  // namespace dccrn

#endif  // DCCRN_BASE_HPP_
