from omlogic.cli import main

main()
