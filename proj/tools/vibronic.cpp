// vibronic — scenario-driven CLI; full implementation lands with the runner.

#include <cstdio>

int main() {
    std::puts("vibronic: not wired up yet");
    return 1;
}
