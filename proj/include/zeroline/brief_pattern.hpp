// Generated by tools/gen_brief_pattern.py. Do not edit.
#pragma once

#include <array>

namespace zeroline::detail {

struct PatternPair {
  int px, py, qx, qy;
};

inline constexpr std::array<PatternPair, 256> kBriefPattern{{
    {-12, -7, -3, -3},
    {0, -11, 13, 5},
    {3, 6, 5, -7},
    {3, -2, 1, -1},
    {-4, -10, 9, 8},
    {-9, -3, -4, -13},
    {11, 2, 1, -13},
    {2, -4, -2, 9},
    {8, 2, -1, -6},
    {-10, 6, 6, 2},
    {-8, -4, 10, 9},
    {-7, -2, 4, -11},
    {-9, -7, -3, 8},
    {8, 1, -5, -12},
    {4, -3, -7, 12},
    {-4, 13, -7, 9},
    {-10, -9, -9, 6},
    {-9, 0, -11, 6},
    {3, -4, 6, -1},
    {-11, -2, 9, 3},
    {-3, 1, 3, 4},
    {7, -7, 7, 10},
    {-12, -1, 12, -2},
    {-1, -2, 0, 1},
    {7, 8, 11, -6},
    {0, -3, -5, 8},
    {-6, 10, 10, -5},
    {-12, 4, 2, -2},
    {-7, 4, -7, 12},
    {-7, 9, 9, 7},
    {-6, -4, -11, 3},
    {3, 12, 3, 1},
    {-6, -3, -12, -3},
    {-6, 10, 4, 3},
    {-12, -3, 8, 9},
    {4, 3, 10, -2},
    {-5, -11, -4, 7},
    {8, -11, -2, 2},
    {3, 11, 1, -2},
    {6, 2, -13, -5},
    {-10, 5, 13, -2},
    {-6, 2, -1, 7},
    {-4, 12, 7, 11},
    {3, 5, -9, -9},
    {-3, -3, 4, 5},
    {13, -3, 6, -10},
    {-4, -6, -4, -12},
    {6, 8, -5, 9},
    {6, 2, 6, -10},
    {4, 11, 2, 4},
    {12, 4, -10, -7},
    {2, -9, -3, 8},
    {0, 3, 2, -7},
    {-6, -4, 4, 9},
    {3, 0, 1, 12},
    {-3, 5, -12, 1},
    {7, 1, 6, 3},
    {13, -2, 3, -8},
    {10, 4, -8, -11},
    {-5, -12, -6, 7},
    {-4, 9, -4, 0},
    {9, 7, 6, -4},
    {-13, -3, 7, -2},
    {11, -1, 7, 5},
    {-2, -2, 10, 4},
    {4, -9, -6, 5},
    {0, 10, 3, -10},
    {12, -3, -4, -7},
    {2, 0, -9, 5},
    {4, 13, -1, -2},
    {-9, -7, 7, 4},
    {-5, -7, 9, -9},
    {-1, 4, 6, -2},
    {-4, 0, 9, 6},
    {-5, -3, 4, -12},
    {-1, -2, -1, 8},
    {1, -7, -4, 11},
    {2, 7, -9, 10},
    {-7, 8, -2, 8},
    {-8, -9, 2, 0},
    {-4, 6, -5, -11},
    {-12, -7, 2, -2},
    {11, 6, -6, 11},
    {-2, 13, -7, -12},
    {-3, 13, -7, 1},
    {-12, 4, 6, 5},
    {11, 5, -8, 2},
    {9, -6, 10, 1},
    {5, 9, -3, 8},
    {2, -8, -6, 12},
    {-8, 11, -11, -5},
    {-5, 4, 8, -1},
    {-8, 2, -11, 8},
    {-8, -11, 3, 2},
    {8, 11, 0, 14},
    {-4, -6, -6, 4},
    {-3, 11, 12, 3},
    {8, 7, 2, -7},
    {0, 11, 5, -6},
    {12, -3, -4, 5},
    {1, 1, 12, -7},
    {11, -5, 10, 9},
    {5, -4, -7, -8},
    {-9, -7, -6, 10},
    {5, 13, -4, 7},
    {0, 8, -7, 3},
    {-9, 5, 10, -7},
    {6, -2, 12, 0},
    {-8, 1, -4, 3},
    {-1, 12, 3, 0},
    {11, 0, -1, 5},
    {-3, -2, 10, -6},
    {-4, 3, 11, -8},
    {-4, -6, -1, -5},
    {-8, -4, -1, 1},
    {4, 10, 1, -1},
    {-1, 4, 12, 7},
    {-7, 10, -4, 6},
    {2, -10, -1, 12},
    {2, 1, 8, -7},
    {10, -8, -3, 2},
    {-12, -4, 5, -6},
    {11, 6, 13, 0},
    {-2, 1, -4, -12},
    {-5, 5, 2, -7},
    {0, 6, -9, -5},
    {5, 12, 3, 6},
    {0, -8, 10, -4},
    {-4, 9, -14, 0},
    {-6, 1, -8, -10},
    {-2, 7, -1, 5},
    {0, -5, -9, -7},
    {-5, 7, -5, -4},
    {7, -9, 1, -8},
    {-2, -12, 4, 9},
    {10, 2, 5, -11},
    {8, 0, -10, 7},
    {-13, 3, 1, -7},
    {0, -5, -1, -7},
    {12, 3, -1, 6},
    {5, -11, 5, 6},
    {-10, -1, -13, -2},
    {3, 12, -8, -3},
    {-8, 6, 7, 2},
    {-12, 4, 3, -13},
    {-10, -5, 5, 12},
    {-10, -8, 6, 8},
    {-2, 5, 4, 9},
    {-12, -6, 13, 5},
    {7, 7, -13, -5},
    {4, -3, -7, 12},
    {-4, 10, -11, 0},
    {4, -11, -9, 8},
    {-6, 0, 2, 7},
    {4, 1, 3, -4},
    {0, 7, -8, 11},
    {-1, 7, 9, 2},
    {6, 10, -8, 10},
    {-1, 9, 12, 5},
    {11, 3, -4, 10},
    {9, -3, 10, 3},
    {6, 11, -7, 7},
    {4, 8, -5, 13},
    {-3, 5, 2, -4},
    {-4, -11, 5, -3},
    {-6, -9, 7, 10},
    {0, -14, -4, -6},
    {6, 9, -5, -1},
    {-6, -6, 3, -5},
    {-1, 6, -9, 9},
    {-8, 8, -10, -6},
    {5, -7, 0, 7},
    {-8, 1, -10, 2},
    {-5, 2, 0, 3},
    {-8, 0, -5, 1},
    {-5, -5, 9, 0},
    {8, -10, 6, 3},
    {0, 11, 0, 13},
    {6, 4, -13, 0},
    {5, 4, 10, -4},
    {6, 2, 10, -1},
    {11, 5, -1, 8},
    {3, 12, -11, 5},
    {-8, -11, 1, -5},
    {-6, -6, 0, 8},
    {-6, -5, 1, 4},
    {6, -10, 3, -4},
    {-4, 0, 7, 10},
    {-2, -12, -9, 8},
    {2, 3, -12, 0},
    {-2, -2, 8, -9},
    {-9, -1, 6, -2},
    {-5, -11, 1, 8},
    {-2, -10, 9, 3},
    {9, -2, 2, -9},
    {1, -10, 5, -9},
    {-12, 0, 4, 5},
    {-2, -1, -9, -8},
    {-11, 7, -6, -5},
    {11, 8, -1, 10},
    {-12, -5, 3, 8},
    {-3, -10, -13, -3},
    {-1, 5, -5, -1},
    {11, 8, -7, 4},
    {-9, 5, -9, 3},
    {-2, -8, -6, -7},
    {-2, -10, 9, 9},
    {-9, 4, -2, -8},
    {1, 3, -5, 7},
    {-9, 5, -10, 1},
    {8, 5, -11, -2},
    {-10, -1, -6, 11},
    {2, -5, 0, 8},
    {-7, 7, 6, 1},
    {-2, 0, 1, -4},
    {-4, -5, -11, -8},
    {4, 3, -12, -6},
    {4, -1, 1, -9},
    {2, 13, -1, 7},
    {0, -8, 10, 4},
    {10, 2, -6, 7},
    {7, 2, 9, 0},
    {-9, -4, -8, 7},
    {1, -2, -2, -9},
    {13, -4, 7, -2},
    {1, 0, 2, -11},
    {-4, -3, -3, 12},
    {-5, -12, 2, 12},
    {-5, -12, 9, 7},
    {-6, 2, -8, -2},
    {6, -1, -3, -10},
    {-11, -4, 12, 5},
    {0, 10, -11, -6},
    {6, 4, -2, 2},
    {8, -4, 8, 11},
    {-1, 6, 1, 2},
    {9, 8, -4, 7},
    {2, -12, 3, 7},
    {-9, 2, 0, 12},
    {2, -4, 12, -7},
    {0, 7, -2, 4},
    {-5, 7, 10, -5},
    {5, 4, -4, -12},
    {-4, 7, 10, 6},
    {4, 9, -3, -9},
    {-8, 6, -10, 9},
    {4, -8, -11, -7},
    {9, 6, -5, 12},
    {-4, 1, 8, 0},
    {0, 12, 2, 6},
    {-10, 7, -5, -3},
    {-1, -8, 0, 12},
    {4, 0, 11, 7},
    {5, -4, -2, 10},
    {-7, 12, 3, -6},
    {-12, 5, 13, -3},
}};

}  // namespace zeroline::detail
