// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace llrecall::embedded {

// Contents of data/stopwords.txt, byte for byte.
std::string_view stopwords_txt();
// Contents of data/qtable_0.05.csv, byte for byte.
std::string_view qtable_csv();

}  // namespace llrecall::embedded
