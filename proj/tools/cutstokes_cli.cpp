/// @file cutstokes_cli.cpp

int main() { return 2; }
