// Copyright 2026 The opfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPFUZZ_TESTS_TEST_UTIL_H_
#define OPFUZZ_TESTS_TEST_UTIL_H_

#include <fstream>
#include <iterator>
#include <string>

#include "opfuzz/corpus.h"

namespace opfuzz::testing {

inline const Corpus &TestCorpus() {
  static const Corpus corpus = LoadCorpus(OPFUZZ_CORPUS_DIR);
  return corpus;
}

inline std::string ReadFile(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace opfuzz::testing

#endif  // OPFUZZ_TESTS_TEST_UTIL_H_
