/// @file driver.cpp

namespace cutstokes {}
