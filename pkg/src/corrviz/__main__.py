from corrviz.cli import main

main()
