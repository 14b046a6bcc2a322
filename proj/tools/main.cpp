#include "nehari/report.hpp"

int main(int argc, char** argv) { return nehari::run_cli(argc, argv); }
