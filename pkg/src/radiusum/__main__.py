from radiusum.cli import main

main()
