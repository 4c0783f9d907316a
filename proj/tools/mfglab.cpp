#include <cstdio>
int main() { std::puts("mfglab: placeholder"); return 0; }
