#pragma once

#include "size_lens/error.hpp"

#include <gtest/gtest.h>

// Passes when `stmt` throws size_lens::Error carrying `expected_code`.
#define EXPECT_SL_ERROR(stmt, expected_code)                                                   \
  do {                                                                                         \
    bool thrown_ = false;                                                                      \
    try {                                                                                      \
      stmt;                                                                                    \
    } catch (const size_lens::Error& e_) {                                                     \
      thrown_ = true;                                                                          \
      EXPECT_EQ(size_lens::to_string(e_.code()), size_lens::to_string(expected_code)) << e_.what(); \
    }                                                                                          \
    EXPECT_TRUE(thrown_) << "expected " << size_lens::to_string(expected_code);                \
  } while (0)
